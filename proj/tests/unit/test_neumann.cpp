#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "qcmap/demo.hpp"
#include "qcmap/neumann.hpp"
#include "qcmap/solution.hpp"

using namespace qc;

namespace {

BeltramiCoefficient demo(const char* text, int n, double L = 2.0) {
    return BeltramiCoefficient::make(DemoMu::parse(text).sample(GridSpec::make(n, L)));
}

// |mu| = k on |z| < 0.9, smoothstep taper to zero at 1.1, phase e^{2 i theta}
BeltramiCoefficient plateau(double k, int n) {
    const auto s = GridSpec::make(n, 2.0);
    const auto f = ComplexField::sample(s, [k](cplx z) {
        const double r = std::abs(z);
        if (r >= 1.1) return cplx(0.0);
        const double t = std::clamp((r - 0.9) / 0.2, 0.0, 1.0);
        return k * (1.0 - t * t * (3.0 - 2.0 * t)) * std::polar(1.0, 2.0 * std::arg(z));
    });
    return BeltramiCoefficient::make(f);
}

} // namespace

TEST_CASE("zero mu short circuits to the identity") {
    const auto mu = demo("zero", 64);
    const auto r = neumann_series(mu, {}, 1e-10, 100);
    CHECK(r.report.iterations == 0);
    CHECK(sup_norm(r.h) == 0.0);
    const auto sol = solve_neumann(mu);
    const auto z = coordinate(mu.spec());
    for (std::size_t i = 0; i < z.size(); ++i) {
        REQUIRE(sol.sol.phi.data[i] == z.data[i]);
        REQUIRE(sol.sol.jacobian[i] == 1.0);
    }
}

TEST_CASE("demo contraction at k = 0.5") {
    const auto mu = demo("radial_bump:0.5:1.0", 128);
    const auto r = neumann_series(mu, {}, 1e-10, 500);
    const double defect = operator_isometry_defect(mu.mu);
    REQUIRE(!r.report.contraction_estimates.empty());
    for (std::size_t m = 0; m < r.report.contraction_estimates.size(); ++m) {
        CHECK(r.report.contraction_estimates[m] <= 0.55);
        CHECK(r.report.contraction_estimates[m] <= mu.k + 2.0 * defect);
    }
    CHECK(r.report.fixed_point_residual <= 2e-10);
    for (std::size_t m = 1; m < r.report.increment_norms.size(); ++m)
        CHECK(r.report.increment_norms[m] < r.report.increment_norms[m - 1]);
}

TEST_CASE("k = 0.9 still converges") {
    const double tol = 1e-10;
    const double predicted = std::log(tol) / std::log(0.9);

    SUBCASE("plateau follows the geometric count") {
        const auto mu = plateau(0.9, 128);
        const auto r = neumann_series(mu, {}, tol, 2000);
        const double defect = operator_isometry_defect(mu.mu);
        CHECK(r.report.iterations >= predicted / 2.0);
        CHECK(r.report.iterations <= predicted * 2.0);
        for (double q : r.report.contraction_estimates) CHECK(q <= 0.9 + 2.0 * defect);
        CHECK(r.report.fixed_point_residual <= 2.0 * tol);
    }
    SUBCASE("scaled demo") {
        const auto mu = demo("radial_bump:0.9:1.0", 128);
        const auto r = neumann_series(mu, {}, tol, 2000);
        CHECK(r.report.iterations <= predicted * 2.0);
        CHECK(r.report.fixed_point_residual <= 2.0 * tol);
        for (std::size_t m = 1; m < r.report.increment_norms.size(); ++m)
            CHECK(r.report.increment_norms[m] < r.report.increment_norms[m - 1]);
    }
    SUBCASE("rotating demo close to 1") {
        const auto mu = demo("rotating_bump:0.99:1.0", 128);
        const auto r = neumann_series(mu, {}, tol, 2000);
        CHECK(r.report.fixed_point_residual <= 2.0 * tol);
    }
}

TEST_CASE("NoConvergence when the budget is too small") {
    const auto mu = plateau(0.9, 64);
    try {
        (void)neumann_series(mu, {}, 1e-12, 5);
        FAIL("expected NoConvergence");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NoConvergence);
    }
}

TEST_CASE("assembled map") {
    const auto mu = demo("radial_bump:0.5:1.0", 256);
    const auto r = neumann_series(mu, {}, 1e-10, 500);
    const auto sol = assemble_map(mu, r.h, {});

    // the Beltrami residual is mu times the fixed point residual
    CHECK(sol.beltrami_residual <= 5.0 * r.report.fixed_point_residual);
    for (std::size_t i = 0; i < sol.phi_zbar.size(); ++i)
        REQUIRE(sol.phi_zbar.data[i] == mu.mu.data[i] * (1.0 + r.h.data[i]));
    const auto Hs = beurling_transform(sol.phi_zbar);
    double chain = 0.0;
    for (std::size_t i = 0; i < Hs.size(); ++i) chain = std::max(chain, std::abs(sol.phi_z.data[i] - 1.0 - Hs.data[i]));
    CHECK(chain <= 1e-14);
    double jmin = 1e300;
    for (std::size_t i = 0; i < sol.jacobian.size(); ++i) {
        CHECK(sol.jacobian[i] == doctest::Approx(std::norm(sol.phi_z.data[i]) - std::norm(sol.phi_zbar.data[i])));
        jmin = std::min(jmin, sol.jacobian[i]);
    }
    CHECK(jmin > 0.0);
}

TEST_CASE("manufactured solution converges") {
    const Manufactured oracle{0.3};
    double err[3];
    const int ns[3] = {64, 128, 256};
    for (int l = 0; l < 3; ++l) {
        const auto s = GridSpec::make(ns[l], 2.0);
        const auto mu = BeltramiCoefficient::make(DemoMu::parse("manufactured:0.3").sample(s));
        const auto sol = normalize(solve_neumann(mu).sol);
        double e = 0.0;
        for (int k = 0; k < s.n; ++k)
            for (int j = 0; j < s.n; ++j) e = std::max(e, std::abs(sol.phi(j, k) - oracle.phi_normalized(s.z(j, k))));
        err[l] = e;
    }
    CHECK(err[1] < err[0]);
    CHECK(err[2] < err[1]);
    CHECK(std::log2(err[0] / err[1]) >= 1.0);
    CHECK(std::log2(err[1] / err[2]) >= 1.0);
}

TEST_CASE("holder constant") {
    CHECK(holder_constant(0.5) == doctest::Approx(2 * std::sqrt(2.0) + 2 * std::sqrt(3.0) + std::sqrt(2.0) + 1).epsilon(1e-14));
    CHECK(holder_constant(0.5) == doctest::Approx(8.7068).epsilon(1e-5));
    CHECK(holder_constant(0.99) > holder_constant(0.9));
    CHECK(holder_constant(0.9) > holder_constant(0.5));
    // C ~ 1/(1-a) near 1 and ~ 2/a near 0
    CHECK(holder_constant(1.0 - 1e-6) * 1e-6 == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(holder_constant(1e-6) * 1e-6 == doctest::Approx(2.0).epsilon(1e-4));
    for (double a : {0.0, 1.0, -0.5, 1.5, std::nan("")}) {
        try {
            (void)holder_constant(a);
            FAIL("expected DomainError");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::DomainError);
        }
    }
}

TEST_CASE("radius predicate") {
    for (double R : {1e-6, 1.0, 100.0}) CHECK(radius_predicate(0.5, 0.0, R));
    const double Rc = std::pow(holder_constant(0.5), -2.0);
    CHECK(Rc == doctest::Approx(0.01319).epsilon(1e-3));
    CHECK(radius_predicate(0.5, 1.0, 0.999 * Rc));
    CHECK_FALSE(radius_predicate(0.5, 1.0, 1.001 * Rc));
    CHECK_FALSE(radius_predicate(0.5, 1.0, 0.05));
    CHECK_THROWS_AS(radius_predicate(1.0, 1.0, 0.1), Error);
}
