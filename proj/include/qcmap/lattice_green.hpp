#pragma once

#include <vector>

#include "qcmap/grid.hpp"

// Free-space Green's function of the 5-point graph Laplacian on Z^2.
namespace qc::lattice {

// Potential kernel a(m, n): a(0,0) = 0, (L a)(x) = -delta(x) with
// (L u)(x) = 4u(x) - sum of the 4 neighbours. Returned as an N x N table, a[n*N + m].
std::vector<double> potential_kernel_table(int N);

// Inverse of (1/2) L applied to neutral charges c on an n x n block
// (zero-padded FFT convolution with -2 a). Non-neutral input picks up a log tail.
std::vector<cplx> apply_free_green(const std::vector<cplx>& c, int n);

// Gauss-Legendre nodes and weights on [-1, 1]
void gauss_legendre(int order, std::vector<double>& x, std::vector<double>& w);

} // namespace qc::lattice
