#pragma once

#include <vector>

#include "qcmap/hodge.hpp"
#include "qcmap/operators.hpp"
#include "qcmap/solution.hpp"

namespace qc {

struct NeumannReport {
    int iterations = 0;
    std::vector<double> increment_norms;       // |h_{m+1} - h_m|
    std::vector<double> contraction_estimates; // consecutive ratios of the above
    double fixed_point_residual = 0.0;         // |h - H(mu h) - H mu| / |H mu|
};

struct NeumannSeries {
    ComplexField h;
    NeumannReport report;
};

// h <- H mu + H(mu h) from h = 0 until the increment drops below tol |H mu|
NeumannSeries neumann_series(const BeltramiCoefficient& mu, const OperatorConfig& cfg, double tol, int max_iter);

// Phi = z + T(mu + mu h), Phi_z = 1 + H(mu + mu h), Phi_zbar = mu + mu h
QCMapSolution assemble_map(const BeltramiCoefficient& mu, const ComplexField& h, const OperatorConfig& cfg);

struct NeumannSolve {
    QCMapSolution sol;
    NeumannReport report;
};
NeumannSolve solve_neumann(const BeltramiCoefficient& mu, const OperatorConfig& cfg = {}, double tol = 1e-10,
                           int max_iter = 500);

// 2^a/a + 3^a/a + 2^(a-1)/(1-a) + 1
double holder_constant(double alpha);

// C_alpha A R^alpha < 1
bool radius_predicate(double alpha, double A, double R);

} // namespace qc
