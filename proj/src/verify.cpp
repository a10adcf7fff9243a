#include "qcmap/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "qcmap/kernel.hpp"
#include "qcmap/neumann.hpp"
#include "qcmap/variational.hpp"

namespace qc {
namespace {

std::string fmt(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6e", v);
    return buf;
}

bool compare(double m, double t, Compare c) {
    switch (c) {
    case Compare::le: return m <= t;
    case Compare::lt: return m < t;
    case Compare::ge: return m >= t;
    case Compare::gt: return m > t;
    }
    return false;
}

// a few polynomial bumps with random complex weights, all inside |z| < 1.3
ComplexField random_smooth_compact(const GridSpec& s, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    ComplexField u(s);
    for (int m = 0; m < 4; ++m) {
        const cplx c(U(rng), U(rng));
        const cplx z0(0.5 * U(rng), 0.5 * U(rng));
        const double r = 0.55 + 0.25 * U(rng);
        for (int k = 0; k < s.n; ++k)
            for (int j = 0; j < s.n; ++j) {
                const double t = 1.0 - std::norm(s.z(j, k) - z0) / (r * r);
                if (t > 0.0) u(j, k) += c * t * t * t * t;
            }
    }
    return u;
}

} // namespace

const VerifyEntry& VerifyReport::add(const std::string& id, double measured, double threshold, Compare cmp,
                                     const GridSpec& grid) {
    VerifyEntry e;
    e.id = id;
    e.measured = measured;
    e.threshold = threshold;
    e.cmp = cmp;
    e.pass = std::isfinite(measured) && compare(measured, threshold, cmp);
    e.n = grid.n;
    e.L = grid.L;
    entries_.push_back(e);
    return entries_.back();
}

const VerifyEntry* VerifyReport::find(const std::string& id) const {
    for (const auto& e : entries_)
        if (e.id == id) return &e;
    return nullptr;
}

bool VerifyReport::all_pass() const {
    return std::all_of(entries_.begin(), entries_.end(), [](const VerifyEntry& e) { return e.pass; });
}

void VerifyReport::append(const VerifyReport& other) {
    entries_.insert(entries_.end(), other.entries_.begin(), other.entries_.end());
}

std::string VerifyReport::to_text() const {
    std::ostringstream os;
    int passed = 0;
    for (const auto& e : entries_) {
        os << "check " << e.id << " measured=" << fmt(e.measured) << " threshold=" << fmt(e.threshold)
           << " pass=" << (e.pass ? 1 : 0) << '\n';
        passed += e.pass;
    }
    os << "summary checks=" << entries_.size() << " passed=" << passed << " failed=" << entries_.size() - passed
       << " thresholds=" << Thresholds::version << '\n';
    return os.str();
}

double beltrami_residual(const QCMapSolution& sol, const ComplexField& mu, DerivMode mode) {
    const auto pz = wirtinger_dz(sol.phi, mode);
    const auto pzb = wirtinger_dzbar(sol.phi, mode);
    const double den = l2_norm(pz);
    const double num = l2_norm(pzb - mu * pz);
    if (den <= 1e-12 * (den + l2_norm(pzb))) return kMaxResidual;
    return num / den;
}

JacobianCheck jacobian_check(const QCMapSolution& sol, const ComplexField& mu) {
    JacobianCheck out;
    out.min_J = std::numeric_limits<double>::infinity();
    constexpr double floor = 1e-12;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        const double pz2 = std::norm(sol.phi_z.data[i]);
        const double J = pz2 - std::norm(sol.phi_zbar.data[i]);
        const double Jf = pz2 * (1.0 - std::norm(mu.data[i]));
        out.min_J = std::min(out.min_J, J);
        out.formula_defect = std::max(out.formula_defect, std::abs(J - Jf) / std::max(J, floor));
    }
    return out;
}

double isothermal_check(const QCMapSolution& sol, const ComplexField& mu) {
    const auto pz = wirtinger_dz(sol.phi);
    const auto pzb = wirtinger_dzbar(sol.phi);
    double worst = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        if (std::abs(pz.data[i]) < 1e-12) throw Error(ErrorCode::DegenerateDerivative, "Phi_z vanishes");
        worst = std::max(worst, std::abs(pzb.data[i] / pz.data[i] - mu.data[i]));
    }
    return worst;
}

HolderLemma holder_lemma_check(const ComplexField& mu, double alpha, const OperatorConfig& cfg, long num_pairs,
                               std::uint64_t seed) {
    HolderLemma out;
    const double A = holder_seminorm(mu, alpha, num_pairs, seed);
    out.rhs = holder_constant(alpha) * A;
    out.lhs = sup_norm(mu) == 0.0 ? 0.0 : holder_seminorm(beurling_transform(mu, cfg), alpha, num_pairs, seed);
    out.pass = out.lhs <= out.rhs * Thresholds{}.holder_slack;
    return out;
}

VerifyReport cross_solver_check(const MuSampler& mu_at, double L, const std::vector<int>& levels, double tol,
                                std::vector<CrossSolverLevel>* out_levels) {
    VerifyReport rep;
    double prev = std::numeric_limits<double>::infinity();
    for (int n : levels) {
        const GridSpec s = GridSpec::make(n, L);
        const auto mu = BeltramiCoefficient::make(mu_at(s));
        const auto neu = normalize(solve_neumann(mu, {}, tol).sol);
        VariationalOptions vo;
        vo.tol = tol;
        const auto var = normalize(solve_variational(mu, vo));
        const double d = sup_norm(neu.phi - var.phi);
        // strictly decreasing, except that exact agreement may stay exact
        rep.add("cross_solver.n" + std::to_string(n), d, prev, prev == 0.0 ? Compare::le : Compare::lt, s);
        if (out_levels) out_levels->push_back({n, d});
        prev = d;
    }
    return rep;
}

void append_solution_checks(VerifyReport& rep, const std::string& prefix, const QCMapSolution& sol,
                            const ComplexField& mu, const Thresholds& thr, const DemoMu* demo) {
    const GridSpec& s = sol.phi.spec;
    const double br = beltrami_residual(sol, mu);
    rep.add(prefix + ".beltrami_residual", br, thr.beltrami_residual, Compare::le, s);
    const auto jc = jacobian_check(sol, mu);
    rep.add(prefix + ".min_jacobian", jc.min_J, 0.0, Compare::gt, s);
    rep.add(prefix + ".formula_defect", jc.formula_defect, thr.formula_factor * br, Compare::le, s);
    double iso = kMaxResidual;
    if (jc.min_J > 0.0) {
        try {
            iso = isothermal_check(sol, mu);
        } catch (const Error&) {
        }
    }
    rep.add(prefix + ".isothermal", iso, thr.isothermal, Compare::le, s);
    const auto nsol = normalize(sol);
    rep.add(prefix + ".normalization_invariance", std::abs(beltrami_residual(nsol, mu) - br), thr.normalization,
            Compare::le, s);
    if (demo && demo->has_oracle()) {
        const auto oracle = demo->oracle();
        double err = 0.0;
        for (int k = 0; k < s.n; ++k)
            for (int j = 0; j < s.n; ++j)
                err = std::max(err, std::abs(nsol.phi(j, k) - oracle.phi_normalized(s.z(j, k))));
        rep.add(prefix + ".oracle_sup_error", err, thr.oracle_error, Compare::le, s);
    }
}

VerifyReport run_suite(const SuiteOptions& opt) {
    const GridSpec s = GridSpec::make(opt.n, opt.L);
    const Thresholds& thr = opt.thr;
    MuSampler sampler;
    if (opt.use_demo) {
        sampler = [d = opt.demo](const GridSpec& g) { return d.sample(g); };
    } else {
        sampler = [f = opt.mu_field](const GridSpec& g) {
            if (!(g == f.spec)) throw Error(ErrorCode::InvalidGrid, "mu file grid differs from the requested grid");
            return f;
        };
    }
    const auto mu = BeltramiCoefficient::make(sampler(s));
    const DemoMu* demo = opt.use_demo ? &opt.demo : nullptr;

    VerifyReport rep;
    const auto neu = solve_neumann(mu, {}, opt.tol);
    rep.add("neumann.fixed_point_residual", neu.report.fixed_point_residual, 2 * opt.tol, Compare::le, s);
    append_solution_checks(rep, "neumann", neu.sol, mu.mu, thr, demo);

    VariationalOptions vo;
    vo.tol = opt.tol;
    const auto psi = build_psi(mu, vo);
    rep.add("variational.weak_residual", psi.weak.final_residual, opt.tol, Compare::le, s);
    rep.add("variational.psi_residual", psi.residual, thr.psi_residual, Compare::le, s);
    auto var = integrate_phi(psi.psi, mu, vo.tol_closed);
    append_solution_checks(rep, "variational", var, mu.mu, thr, demo);

    if (!opt.full) return rep;

    // kernel majorants on the mu grid
    const auto kb = kernel_bound_check(mu.mu, 20000, 7);
    rep.add("kernel.bound_i", kb.max_ratio_i, 1.0 + thr.kernel_bound, Compare::le, s);
    rep.add("kernel.bound_ii", kb.max_ratio_ii, thr.holder_slack, Compare::le, s);
    rep.add("kernel.continuity", kb.max_ratio_continuity, 1.0 + thr.kernel_bound, Compare::le, s);

    // Green identity at two levels, fixed bump and point
    {
        const DemoMu phi_bump = DemoMu::parse("radial_bump:0.9:0.5:0.1:0");
        double prev = 0.0;
        for (int lvl = 0; lvl < 2; ++lvl) {
            const GridSpec g = GridSpec::make(opt.n / (lvl == 0 ? 2 : 1), opt.L);
            const double r = std::abs(green_identity_residual(phi_bump.sample(g), sampler(g), {0.12, 0.07}));
            if (lvl == 1) rep.add("kernel.green_identity_ratio", r / prev, thr.green_ratio, Compare::le, g);
            prev = r;
        }
    }

    for (double alpha : {0.3, 0.5, 0.7}) {
        const auto hl = holder_lemma_check(mu.mu, alpha);
        char id[64];
        std::snprintf(id, sizeof id, "holder_lemma.alpha%.1f", alpha);
        rep.add(id, hl.lhs, hl.rhs * thr.holder_slack, Compare::le, s);
    }

    {
        const auto mc = metric_coefficients(mu);
        const double c = (1.0 - mu.k) / (1.0 + mu.k);
        std::mt19937_64 rng(11);
        double worst = std::numeric_limits<double>::infinity();
        for (int t = 0; t < 20; ++t) {
            const auto u = random_smooth_compact(s, rng);
            const double q = mu_inner_product(u, u, mc).real();
            worst = std::min(worst, q / h_seminorm_sq(u) - c);
        }
        rep.add("hodge.coercivity_margin", worst, -thr.coercivity, Compare::ge, s);
    }

    if (!mu.is_zero()) rep.add("operators.isometry_defect", operator_isometry_defect(mu.mu), thr.isometry_defect,
                               Compare::le, s);

    rep.append(cross_solver_check(sampler, opt.L, {opt.n / 2, opt.n}, opt.tol));
    return rep;
}

} // namespace qc
