#pragma once

#include <string>
#include <vector>

#include "qcmap/grid.hpp"

namespace qc {

struct QCMapSolution {
    ComplexField phi;
    ComplexField phi_z;    // stored analytic derivative fields of the construction
    ComplexField phi_zbar;
    std::vector<double> jacobian;
    double beltrami_residual = 0.0; // |phi_zbar - mu phi_z| / |phi_z| on the stored fields
    std::string method;
    int iterations = 0;
    double solver_residual = 0.0;
    double closed_residual = 0.0;
};

// (phi - phi(0)) / (phi(1) - phi(0)), values at 0 and 1 by bilinear interpolation.
// Throws DegenerateNormalization.
QCMapSolution normalize(const QCMapSolution& sol);

} // namespace qc
