#pragma once

#include <cstdint>

#include "qcmap/grid.hpp"

namespace qc {

// S(w,z) = 1 / (pi (w - z + mu_w (conj w - conj z)))
struct KernelSample {
    cplx w, z;
    cplx value;
    double bound_ratio = 0.0; // |S| pi (1-k) |w-z|, <= 1
};

cplx kernel_S(cplx w, cplx z, cplx mu_w);
KernelSample kernel_sample(cplx w, cplx z, cplx mu_w, double k);

// f_zb - mu f_z  and  f_zb - (mu f)_z
ComplexField dbar_mu(const ComplexField& f, const ComplexField& mu, DerivMode mode = DerivMode::central);
ComplexField dbar_mu_star(const ComplexField& f, const ComplexField& mu, DerivMode mode = DerivMode::central);

enum class ProbeDerivative { finite_difference, analytic };

// max over a ring of probes of |S_zb - mu_w S_z| |w - z|^2
double frozen_coefficient_residual(cplx w, cplx mu_w, double probe_spacing,
                                   ProbeDerivative how = ProbeDerivative::finite_difference);

// nearest cell centre; throws PointOutsideGrid unless it has all four neighbours
struct CellIndex {
    int j, k;
};
CellIndex snap_interior(const GridSpec& s, cplx z);

// int phi(w) d^{mu*}_z S(w,z) dw - phi(z) - d^{mu*}_z int phi(w) S(w,z) dw at the cell nearest z
cplx green_identity_residual(const ComplexField& phi, const ComplexField& mu, cplx z);

// int g d^{mu*}(rho S(w,.)) + int F rho S(w,.), w snapped to a cell centre.
// Throws PreconditionResidualTooLarge when |dbar_mu g - F| > tol |g_z|.
cplx representation_reconstruct(const ComplexField& g, const ComplexField& F, const ComplexField& mu,
                                const ComplexField& rho, cplx w, double tol = 1e-8);

// int over the disc B(0,R) of |u(z)| / |w - z|; throws BallOutsideGrid
double riesz_potential(const ComplexField& u, double R, cplx w);

// int of 1/|zeta| over the square [x0,x1] x [y0,y1]
double inverse_distance_integral(double x0, double x1, double y0, double y1);
// over the centred square of side h: 4 h ln(1 + sqrt 2)
inline double centred_cell_inverse_distance(double h) { return 4.0 * h * 0.88137358701954302523; }

// Sampled majorants: (boundi) for S, (boundii) for d^{mu*} S, and the Cauchy kernel
// continuity bound |K(w1,z) - K(w2,z)| <= |w1-w2| (|w1-z|^-2 + |w2-z|^-2) / (2 pi).
struct KernelBoundStats {
    long samples = 0;
    double max_ratio_i = 0.0;
    double max_ratio_ii = 0.0;
    double max_ratio_continuity = 0.0;
    long violations_i = 0;
    long violations_ii = 0;
    long violations_continuity = 0;
};

// points are cell centres of mu's grid, mu_w and mu_z from the field
KernelBoundStats kernel_bound_check(const ComplexField& mu, long samples, std::uint64_t seed);
// free samples with |mu_w| <= k uniformly in the disc, (boundi) only
KernelBoundStats kernel_bound_check_random(double k, long samples, std::uint64_t seed);

} // namespace qc
