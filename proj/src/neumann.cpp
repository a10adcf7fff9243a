#include "qcmap/neumann.hpp"

#include <cmath>

namespace qc {

NeumannSeries neumann_series(const BeltramiCoefficient& mu, const OperatorConfig& cfg, double tol, int max_iter) {
    const GridSpec& s = mu.spec();
    NeumannSeries out;
    out.h = ComplexField(s);
    if (mu.is_zero()) return out;

    const ComplexField Hmu = beurling_transform(mu.mu, cfg);
    const double nHmu = l2_norm(Hmu);
    ComplexField h(s);
    auto& rep = out.report;
    bool converged = false;
    for (int m = 0; m < max_iter; ++m) {
        ComplexField next = Hmu + beurling_transform(mu.mu * h, cfg);
        const double inc = l2_norm(next - h);
        rep.increment_norms.push_back(inc);
        if (rep.increment_norms.size() > 1) {
            const double prev = rep.increment_norms[rep.increment_norms.size() - 2];
            rep.contraction_estimates.push_back(inc / prev);
        }
        h = std::move(next);
        rep.iterations = m + 1;
        if (inc <= tol * nHmu) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw Error(ErrorCode::NoConvergence, "Neumann series did not converge in " + std::to_string(max_iter));
    rep.fixed_point_residual = l2_norm(h - beurling_transform(mu.mu * h, cfg) - Hmu) / nHmu;
    out.h = std::move(h);
    return out;
}

QCMapSolution assemble_map(const BeltramiCoefficient& mu, const ComplexField& h, const OperatorConfig& cfg) {
    const GridSpec& s = mu.spec();
    QCMapSolution sol;
    sol.method = "neumann";
    sol.phi = coordinate(s);
    sol.phi_z = ComplexField(s, 1.0);
    sol.phi_zbar = ComplexField(s);
    sol.jacobian.assign(s.size(), 1.0);
    if (mu.is_zero()) return sol; // identity, bit for bit

    ComplexField src(s);
    for (std::size_t i = 0; i < src.size(); ++i) src.data[i] = mu.mu.data[i] * (1.0 + h.data[i]);
    const auto T = cauchy_transform(src, cfg);
    const auto H = beurling_transform(src, cfg);
    for (std::size_t i = 0; i < src.size(); ++i) {
        sol.phi.data[i] += T.data[i];
        sol.phi_z.data[i] += H.data[i];
        sol.phi_zbar.data[i] = src.data[i];
        sol.jacobian[i] = std::norm(sol.phi_z.data[i]) - std::norm(sol.phi_zbar.data[i]);
    }
    sol.beltrami_residual = l2_norm(sol.phi_zbar - mu.mu * sol.phi_z) / l2_norm(sol.phi_z);
    return sol;
}

NeumannSolve solve_neumann(const BeltramiCoefficient& mu, const OperatorConfig& cfg, double tol, int max_iter) {
    auto series = neumann_series(mu, cfg, tol, max_iter);
    NeumannSolve out{assemble_map(mu, series.h, cfg), series.report};
    out.sol.iterations = series.report.iterations;
    out.sol.solver_residual = series.report.fixed_point_residual;
    return out;
}

double holder_constant(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::DomainError, "alpha must lie in (0,1)");
    return std::pow(2.0, alpha) / alpha + std::pow(3.0, alpha) / alpha + std::pow(2.0, alpha - 1.0) / (1.0 - alpha) +
           1.0;
}

bool radius_predicate(double alpha, double A, double R) {
    const double C = holder_constant(alpha);
    if (A < 0.0 || !(R > 0.0)) throw Error(ErrorCode::DomainError, "need A >= 0 and R > 0");
    return C * A * std::pow(R, alpha) < 1.0;
}

} // namespace qc
