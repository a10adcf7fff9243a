#pragma once

#include <vector>

#include "qcmap/hodge.hpp"
#include "qcmap/solution.hpp"

namespace qc {

enum class Boundary {
    free_space, // exterior is the mu = 0 plane, exact lattice Green's function
    natural     // do-nothing boundary on the box
};

struct WeakSolveReport {
    int iterations = 0;
    double final_residual = 0.0;
    double coercivity_used = 1.0;
    Boundary boundary = Boundary::free_space;
};

struct WeakSolution {
    ComplexField f;
    WeakSolveReport report;
};

// Hermitian form sum_T W (Dv)^H M (Du) of the P1 elements on both diagonal
// triangulations (four corner triangles per square, W = h^2/4), with
// M = [[a, -conj b], [-b, a]] frozen at the square centre. At mu = 0 it is half the
// 5-point graph Laplacian.
class WeakOperator {
public:
    explicit WeakOperator(const ComplexField& mu);

    // A x, or (A - A0) x when perturbation_only
    std::vector<cplx> apply(const std::vector<cplx>& x, bool perturbation_only = false) const;
    // serial loop over squares, same arithmetic; kept as the reference for apply()
    std::vector<cplx> apply_serial(const std::vector<cplx>& x, bool perturbation_only = false) const;
    // D^H W [G; F] for eta = G dz - F dzbar
    std::vector<cplx> rhs(const OneForm& eta) const;

    const GridSpec& spec() const { return spec_; }

private:
    void square_flux(int j, int k, const std::vector<cplx>& x, bool pert, cplx P[4], cplx Q[4]) const;
    void scatter(int j, int k, const cplx P[4], const cplx Q[4], std::vector<cplx>& y) const;

    GridSpec spec_;
    std::vector<double> a_;   // per square
    std::vector<cplx> b_;
    std::vector<char> active_; // mu != 0 at the square centre
};

// Solve id(*_mu df) = d eta weakly; zero-mean gauge. Throws NoConvergence, InvalidEta.
WeakSolution solve_weak(const BeltramiCoefficient& mu, const OneForm& eta, double tol, int max_iter,
                        Boundary boundary = Boundary::free_space);

// L(v) = int G conj(v_z) + F conj(v_zbar), the right side of the weak equation
cplx weak_functional(const ComplexField& v, const OneForm& eta, DerivMode mode = DerivMode::central);

// omega = i *_mu df - eta
OneForm conjugate_form(const ComplexField& f, const ComplexField& mu, const OneForm& eta);

struct ConjugateField {
    ComplexField g;
    double closed_residual = 0.0;
    double dz_residual = 0.0;
    double dzbar_residual = 0.0;
};

ConjugateField conjugate_field(const ComplexField& f, const BeltramiCoefficient& mu, const OneForm& eta,
                               double tol_closed);

struct VariationalOptions {
    double tol = 1e-10;
    int max_iter = 2000;
    double tol_closed = 0.25; // discretization-level curl of omega is about 0.14 at h = 1/16
    Boundary boundary = Boundary::free_space;
};

struct PsiResult {
    ComplexField psi;
    double residual = 0.0;        // |Psi_zb - mu Psi_z - (F + mu G)| / |F + mu G|
    double closed_residual = 0.0; // of omega
    WeakSolveReport weak;
};

// eta = -(d_z mu) dzbar, so that Psi_zbar - mu Psi_z = d_z mu
PsiResult build_psi(const BeltramiCoefficient& mu, const VariationalOptions& opt = {});
// arbitrary compact eta = G dz - F dzbar: Psi_zbar - mu Psi_z = F + mu G
PsiResult build_psi(const BeltramiCoefficient& mu, const OneForm& eta, const VariationalOptions& opt = {});

// Phi = antiderivative of e^Psi dz + mu e^Psi dzbar. Throws NotClosed, NonPositiveJacobian.
QCMapSolution integrate_phi(const ComplexField& psi, const BeltramiCoefficient& mu, double tol_closed);

// whole pipeline, unnormalised
QCMapSolution solve_variational(const BeltramiCoefficient& mu, const VariationalOptions& opt = {});

struct FarField {
    cplx b = 0.0;
    double decay_defect = 0.0;
    cplx scale = 1.0; // leading coefficient A removed before the fit
};

// Phi ~ A (z + b + O(1/z)) on the outermost grid ring
FarField far_field_fit(const QCMapSolution& sol, const BeltramiCoefficient& mu);

} // namespace qc
