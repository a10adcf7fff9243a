#pragma once

#include <vector>

#include "qcmap/grid.hpp"

namespace qc {

// mu with sup norm k < 1, vanishing on an outer ring of >= n/8 cells
struct BeltramiCoefficient {
    ComplexField mu;
    double k = 0.0;
    int support_margin = 0;

    static BeltramiCoefficient make(ComplexField mu);
    const GridSpec& spec() const { return mu.spec; }
    bool is_zero() const { return k == 0.0; }
};

// number of all-zero outer rings
int zero_margin(const ComplexField& f);

struct MetricCoefficients {
    GridSpec spec;
    std::vector<double> a; // (1+|mu|^2)/(1-|mu|^2)
    std::vector<cplx> b;   // 2 mu/(1-|mu|^2)
    double k = 0.0;

    // max over points of |a^2-|b|^2-1|/a^2 and |a-|b| - (1-|mu|)/(1+|mu|)|
    double identity_defect(const ComplexField& mu) const;
};

MetricCoefficients metric_coefficients(const BeltramiCoefficient& mu);
// same, for any field with |mu| < 1 (no support requirement)
MetricCoefficients metric_coefficients(const ComplexField& mu);

// (p, q) -> (-i a p + i conj(b) q, -i b p + i a q)
OneForm hodge_star_1form(const OneForm& omega, const MetricCoefficients& mc);

// 1/2 (1 - i *) df
OneForm d_mu(const ComplexField& f, const MetricCoefficients& mc, DerivMode mode = DerivMode::central);

// Delta_mu f = -* d * d f, the negative of the Euclidean Laplacian at mu = 0
ComplexField laplace_beltrami(const ComplexField& f, const MetricCoefficients& mc,
                              DerivMode mode = DerivMode::central);

// 1 - |mu|^2: (i/2)(1 - |mu|^2) dz ^ dzbar = (1 - |mu|^2) dx dy
std::vector<double> volume_density(const MetricCoefficients& mc);

// sesquilinear, conjugate-linear in v:
//   sum h^2 [ a (u_z conj v_z + u_zb conj v_zb) - b u_z conj v_zb - conj(b) u_zb conj v_z ]
cplx mu_inner_product(const ComplexField& u, const ComplexField& v, const MetricCoefficients& mc,
                      DerivMode mode = DerivMode::central);

// int du ^ *_mu d(conj v), built from the wedge and star primitives
cplx wedge_star_form(const ComplexField& u, const ComplexField& v, const MetricCoefficients& mc,
                     DerivMode mode = DerivMode::central);

// int alpha ^ beta for 1-forms, as a multiple of dx dy
cplx wedge_integral(const OneForm& alpha, const OneForm& beta);

// |u_z|^2 + |u_zb|^2 summed with h^2
double h_seminorm_sq(const ComplexField& u, DerivMode mode = DerivMode::central);

} // namespace qc
