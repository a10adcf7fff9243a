#include <doctest.h>

#include <cmath>
#include <functional>
#include <regex>
#include <sstream>
#include <string>

#include "qcmap/demo.hpp"
#include "qcmap/neumann.hpp"
#include "qcmap/verify.hpp"

using namespace qc;

namespace {

// solution record built from closed forms, derivative fields stored exactly
QCMapSolution closed_form(const GridSpec& s, const std::function<cplx(cplx)>& phi, const std::function<cplx(cplx)>& pz,
                          const std::function<cplx(cplx)>& pzb) {
    QCMapSolution sol;
    sol.phi = ComplexField::sample(s, phi);
    sol.phi_z = ComplexField::sample(s, pz);
    sol.phi_zbar = ComplexField::sample(s, pzb);
    sol.jacobian.resize(s.size());
    for (std::size_t i = 0; i < s.size(); ++i)
        sol.jacobian[i] = std::norm(sol.phi_z.data[i]) - std::norm(sol.phi_zbar.data[i]);
    sol.method = "closed_form";
    return sol;
}

QCMapSolution identity(const GridSpec& s) {
    return closed_form(s, [](cplx z) { return z; }, [](cplx) { return cplx(1.0); }, [](cplx) { return cplx(0.0); });
}

QCMapSolution reflection(const GridSpec& s) {
    return closed_form(s, [](cplx z) { return std::conj(z); }, [](cplx) { return cplx(0.0); },
                       [](cplx) { return cplx(1.0); });
}

BeltramiCoefficient demo(const char* text, int n) {
    return BeltramiCoefficient::make(DemoMu::parse(text).sample(GridSpec::make(n, 2.0)));
}

} // namespace

TEST_CASE("beltrami residual") {
    const auto s = GridSpec::make(64, 2.0);
    const ComplexField zero(s);
    CHECK(beltrami_residual(identity(s), zero) <= 1e-14);
    CHECK(beltrami_residual(reflection(s), zero) == kMaxResidual);

    // affine Beltrami map z + c conj z solves the equation with constant mu = c
    const cplx c(0.3, -0.2);
    const auto aff = closed_form(s, [c](cplx z) { return z + c * std::conj(z); }, [](cplx) { return cplx(1.0); },
                                 [c](cplx) { return c; });
    CHECK(beltrami_residual(aff, ComplexField(s, c)) <= 1e-14);

    // manufactured pair: only the discretization error of the difference stencil remains
    const Manufactured m{0.3};
    double prev = 1.0;
    for (int n : {64, 128, 256}) {
        const auto g = GridSpec::make(n, 2.0);
        const auto sol = closed_form(g, [&](cplx z) { return m.phi(z); }, [&](cplx z) { return m.phi_z(z); },
                                     [&](cplx z) { return m.phi_zbar(z); });
        const double r = beltrami_residual(sol, ComplexField::sample(g, [&](cplx z) { return m.mu(z); }));
        CHECK(r < prev / 3.0);
        prev = r;
    }
    CHECK(prev <= 1e-3);
}

TEST_CASE("jacobian check") {
    const auto s = GridSpec::make(32, 2.0);
    const ComplexField zero(s);
    auto j = jacobian_check(identity(s), zero);
    CHECK(j.min_J == 1.0);
    CHECK(j.formula_defect == 0.0);
    j = jacobian_check(reflection(s), zero);
    CHECK(j.min_J == -1.0);

    const auto mu = demo("radial_bump:0.5:1.0", 128);
    const auto sol = solve_neumann(mu).sol;
    j = jacobian_check(sol, mu.mu);
    double min_pz = 1e300;
    for (const auto& v : sol.phi_z.data) min_pz = std::min(min_pz, std::norm(v));
    CHECK(j.min_J >= (1.0 - 0.25) * min_pz);
    CHECK(j.min_J > 0.0);
    CHECK(j.formula_defect <= 1e-12);
}

TEST_CASE("isothermal check") {
    const auto s = GridSpec::make(64, 2.0);
    const ComplexField zero(s);
    CHECK(isothermal_check(identity(s), zero) == 0.0);
    const cplx a(1.5, -0.7), b(0.2, 0.9);
    const auto aff = closed_form(s, [&](cplx z) { return a * z + b; }, [&](cplx) { return a; },
                                 [](cplx) { return cplx(0.0); });
    CHECK(isothermal_check(aff, zero) <= 1e-14);
    try {
        (void)isothermal_check(reflection(s), zero);
        FAIL("expected DegenerateDerivative");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegenerateDerivative);
    }

    std::vector<double> iso;
    for (int n : {64, 128, 256}) {
        const auto mu = demo("radial_bump:0.5:1.0", n);
        iso.push_back(isothermal_check(solve_neumann(mu).sol, mu.mu));
    }
    CHECK(iso[1] < iso[0]);
    CHECK(iso[2] < iso[1]);
}

TEST_CASE("isothermal and beltrami vanish together") {
    const auto s = GridSpec::make(64, 2.0);
    // exact for the central stencil: linear maps
    const cplx c(0.4, 0.1);
    const auto lin = closed_form(s, [c](cplx z) { return z + c * std::conj(z); }, [](cplx) { return cplx(1.0); },
                                 [c](cplx) { return c; });
    const ComplexField muc(s, c);
    CHECK(beltrami_residual(lin, muc) <= 1e-14);
    CHECK(isothermal_check(lin, muc) <= 1e-13);
    // and both are clearly nonzero for the wrong mu
    const ComplexField wrong(s, cplx(0.1, 0.0));
    CHECK(beltrami_residual(lin, wrong) > 0.1);
    CHECK(isothermal_check(lin, wrong) > 0.1);
}

TEST_CASE("normalization invariance of the quotient check") {
    const auto mu = demo("rotating_bump:0.5:1.0", 128);
    const auto sol = solve_neumann(mu).sol;
    CHECK(std::abs(beltrami_residual(normalize(sol), mu.mu) - beltrami_residual(sol, mu.mu)) <= 1e-12);
}

TEST_CASE("holder lemma") {
    const auto s = GridSpec::make(64, 2.0);
    const auto z = holder_lemma_check(ComplexField(s), 0.5);
    CHECK(z.lhs == 0.0);
    CHECK(z.rhs == 0.0);
    CHECK(z.pass);
    const auto mu = demo("radial_bump:0.5:1.0", 128);
    for (double a : {0.5, 0.9}) {
        const auto h = holder_lemma_check(mu.mu, a);
        CHECK(h.pass);
        CHECK(h.lhs > 0.0);
        CHECK(h.lhs <= h.rhs * 1.05);
    }
    CHECK(holder_lemma_check(mu.mu, 0.5).rhs > 5.0 * holder_lemma_check(mu.mu, 0.5).lhs);
}

TEST_CASE("cross solver") {
    SUBCASE("zero mu agrees exactly") {
        const auto rep = cross_solver_check([](const GridSpec& s) { return ComplexField(s); }, 2.0, {32, 64}, 1e-10);
        for (const auto& e : rep.entries()) CHECK(e.measured == 0.0);
        CHECK(rep.all_pass());
    }
    SUBCASE("demo disagreement shrinks") {
        std::vector<CrossSolverLevel> lv;
        const auto rep = cross_solver_check(
            [](const GridSpec& s) { return DemoMu::parse("radial_bump:0.5:1.0").sample(s); }, 2.0, {64, 128, 256}, 1e-10,
            &lv);
        REQUIRE(lv.size() == 3);
        CHECK(lv[1].disagreement < lv[0].disagreement);
        CHECK(lv[2].disagreement < lv[1].disagreement);
        CHECK(rep.all_pass());
        REQUIRE(rep.find("cross_solver.n128") != nullptr);
        CHECK(rep.find("cross_solver.n128")->threshold == lv[0].disagreement);
        CHECK(std::isinf(rep.find("cross_solver.n64")->threshold));
    }
}

TEST_CASE("report format") {
    VerifyReport rep;
    const auto s = GridSpec::make(16, 1.0);
    rep.add("a.first", 0.5, 1.0, Compare::le, s);
    rep.add("a.second", 2.0, 1.0, Compare::le, s);
    rep.add("a.third", 3.0, 0.0, Compare::gt, s);
    rep.add("a.nan", std::nan(""), 1.0, Compare::le, s);
    CHECK(rep.find("a.first")->pass);
    CHECK_FALSE(rep.find("a.second")->pass);
    CHECK(rep.find("a.third")->pass);
    CHECK_FALSE(rep.find("a.nan")->pass);
    CHECK(rep.find("a.first")->n == 16);
    CHECK(rep.find("missing") == nullptr);
    CHECK_FALSE(rep.all_pass());

    const std::string text = rep.to_text();
    std::istringstream is(text);
    std::string line;
    const std::regex check_re(R"(check [a-z0-9_.]+ measured=\S+ threshold=\S+ pass=[01])");
    int checks = 0;
    std::string last;
    while (std::getline(is, line)) {
        if (line.rfind("check ", 0) == 0) {
            CHECK(std::regex_match(line, check_re));
            ++checks;
        }
        last = line;
    }
    CHECK(checks == 4);
    CHECK(text.find("check a.first measured=5.000000e-01 threshold=1.000000e+00 pass=1") != std::string::npos);
    CHECK(last == "summary checks=4 passed=2 failed=2 thresholds=thresholds-v1");

    VerifyReport other;
    other.add("b.only", 0.0, 1.0);
    rep.append(other);
    CHECK(rep.entries().size() == 5);
}

TEST_CASE("suites on the demo field") {
    SuiteOptions opt;
    opt.demo = DemoMu::parse("radial_bump:0.5:1.0");
    opt.n = 64;
    const auto core = run_suite(opt);
    CHECK(core.all_pass());
    for (const char* id : {"neumann.beltrami_residual", "neumann.min_jacobian", "variational.beltrami_residual",
                           "variational.isothermal", "neumann.fixed_point_residual"})
        CHECK_MESSAGE(core.find(id) != nullptr, id);
    CHECK(core.find("kernel.bound_i") == nullptr);

    opt.full = true;
    const auto full = run_suite(opt);
    CHECK(full.entries().size() > core.entries().size());
    for (const auto& e : full.entries()) CHECK_MESSAGE(e.pass, e.id, " measured=", e.measured, " threshold=", e.threshold);
    for (const char* id : {"kernel.bound_i", "kernel.green_identity_ratio", "holder_lemma.alpha0.5",
                           "hodge.coercivity_margin", "operators.isometry_defect", "cross_solver.n64"})
        CHECK_MESSAGE(full.find(id) != nullptr, id);

    SuiteOptions man;
    man.demo = DemoMu::parse("manufactured:0.3");
    man.n = 128; // default thresholds are set for the n = 128 desk resolution
    const auto m = run_suite(man);
    CHECK(m.all_pass());
    CHECK(m.find("neumann.oracle_sup_error") != nullptr);
}
