#include "qcmap/variational.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qcmap/fft.hpp"
#include "qcmap/lattice_green.hpp"

namespace qc {
namespace {

// corner triangles of square (j,k): node offsets for (x+, x-, y+, y-)
// relative to n00, with n10 = +1, n01 = +n, n11 = +n+1
struct Tri {
    int xp, xm, yp, ym;
};

Tri corner(int t, int n) {
    const int n00 = 0, n10 = 1, n01 = n, n11 = n + 1;
    switch (t) {
    case 0: return {n10, n00, n01, n00};
    case 1: return {n10, n00, n11, n10};
    case 2: return {n11, n01, n01, n00};
    default: return {n11, n01, n11, n10};
    }
}

double dot_re(const std::vector<cplx>& x, const std::vector<cplx>& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
    return s;
}

double norm2(const std::vector<cplx>& x) { return std::sqrt(dot_re(x, x)); }

void remove_mean(std::vector<cplx>& x) {
    cplx m = 0.0;
    for (auto v : x) m += v;
    m /= double(x.size());
    for (auto& v : x) v -= m;
}

// (1/2 L_neumann)^+ by cosine transform; approximate inverse of the box operator
std::vector<cplx> neumann_precondition(const std::vector<cplx>& r, int n) {
    std::vector<double> re(r.size()), im(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        re[i] = r[i].real();
        im[i] = r[i].imag();
    }
    fft::dct2(re, n);
    fft::dct2(im, n);
    const double pi = std::numbers::pi;
    const double norm = 1.0 / (4.0 * double(n) * n);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) {
            const std::size_t i = std::size_t(k) * n + j;
            const double lam = 0.5 * ((2.0 - 2.0 * std::cos(pi * j / n)) + (2.0 - 2.0 * std::cos(pi * k / n)));
            const double s = lam > 0.0 ? norm / lam : 0.0;
            re[i] *= s;
            im[i] *= s;
        }
    fft::idct2(re, n);
    fft::idct2(im, n);
    std::vector<cplx> out(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) out[i] = {re[i], im[i]};
    remove_mean(out);
    return out;
}

void check_eta_support(const OneForm& eta) {
    for (const ComplexField* c : {&eta.p, &eta.q}) {
        const double s = sup_norm(*c);
        if (s == 0.0) continue;
        if (!eta.p.all_finite() || !eta.q.all_finite()) throw Error(ErrorCode::InvalidEta, "eta is not finite");
        const int n = c->spec.n;
        double edge = 0.0;
        for (int k = 0; k < n; ++k)
            for (int j = 0; j < n; ++j)
                if (j < 2 || k < 2 || j >= n - 2 || k >= n - 2) edge = std::max(edge, std::abs((*c)(j, k)));
        if (edge > 1e-12 * s) throw Error(ErrorCode::InvalidEta, "eta does not vanish on the boundary ring");
    }
}

} // namespace

WeakOperator::WeakOperator(const ComplexField& mu) : spec_(mu.spec) {
    const int n = spec_.n;
    const std::size_t ns = std::size_t(n - 1) * (n - 1);
    a_.assign(ns, 1.0);
    b_.assign(ns, 0.0);
    active_.assign(ns, 0);
    for (int k = 0; k + 1 < n; ++k)
        for (int j = 0; j + 1 < n; ++j) {
            const cplx m = 0.25 * (mu(j, k) + mu(j + 1, k) + mu(j, k + 1) + mu(j + 1, k + 1));
            const std::size_t s = std::size_t(k) * (n - 1) + j;
            if (m == 0.0) continue;
            const double m2 = std::norm(m);
            a_[s] = (1.0 + m2) / (1.0 - m2);
            b_[s] = 2.0 * m / (1.0 - m2);
            active_[s] = 1;
        }
}

void WeakOperator::square_flux(int j, int k, const std::vector<cplx>& x, bool pert, cplx P[4], cplx Q[4]) const {
    const int n = spec_.n;
    const double h = spec_.h();
    const double W = 0.25 * h * h;
    const std::size_t s = std::size_t(k) * (n - 1) + j;
    const std::size_t base = spec_.idx(j, k);
    const double aa = pert ? a_[s] - 1.0 : a_[s];
    const cplx b = b_[s];
    for (int t = 0; t < 4; ++t) {
        const Tri tr = corner(t, n);
        const cplx dx = x[base + tr.xp] - x[base + tr.xm];
        const cplx dy = x[base + tr.yp] - x[base + tr.ym];
        const cplx p = (dx - I * dy) / (2.0 * h);
        const cplx q = (dx + I * dy) / (2.0 * h);
        P[t] = W * (aa * p - std::conj(b) * q);
        Q[t] = W * (-b * p + aa * q);
    }
}

void WeakOperator::scatter(int j, int k, const cplx P[4], const cplx Q[4], std::vector<cplx>& y) const {
    const int n = spec_.n;
    const double c = 1.0 / (2.0 * spec_.h());
    const std::size_t base = spec_.idx(j, k);
    for (int t = 0; t < 4; ++t) {
        const Tri tr = corner(t, n);
        const cplx sx = c * (P[t] + Q[t]);
        const cplx sy = c * I * (P[t] - Q[t]);
        y[base + tr.xp] += sx;
        y[base + tr.xm] -= sx;
        y[base + tr.yp] += sy;
        y[base + tr.ym] -= sy;
    }
}

std::vector<cplx> WeakOperator::apply(const std::vector<cplx>& x, bool pert) const {
    const int n = spec_.n;
    std::vector<cplx> y(x.size(), 0.0);
    // four colours of squares; squares of one colour share no nodes
    for (int colour = 0; colour < 4; ++colour) {
        const int jo = colour & 1, ko = colour >> 1;
#pragma omp parallel for schedule(static)
        for (int k = ko; k < n - 1; k += 2) {
            cplx P[4], Q[4];
            for (int j = jo; j < n - 1; j += 2) {
                if (pert && !active_[std::size_t(k) * (n - 1) + j]) continue;
                square_flux(j, k, x, pert, P, Q);
                scatter(j, k, P, Q, y);
            }
        }
    }
    return y;
}

std::vector<cplx> WeakOperator::apply_serial(const std::vector<cplx>& x, bool pert) const {
    const int n = spec_.n;
    std::vector<cplx> y(x.size(), 0.0);
    for (int colour = 0; colour < 4; ++colour) {
        const int jo = colour & 1, ko = colour >> 1;
        for (int k = ko; k < n - 1; k += 2) {
            cplx P[4], Q[4];
            for (int j = jo; j < n - 1; j += 2) {
                if (pert && !active_[std::size_t(k) * (n - 1) + j]) continue;
                square_flux(j, k, x, pert, P, Q);
                scatter(j, k, P, Q, y);
            }
        }
    }
    return y;
}

std::vector<cplx> WeakOperator::rhs(const OneForm& eta) const {
    check_same_grid(eta.p.spec, spec_);
    const int n = spec_.n;
    const double W = 0.25 * spec_.h() * spec_.h();
    std::vector<cplx> y(spec_.size(), 0.0);
    for (int k = 0; k + 1 < n; ++k)
        for (int j = 0; j + 1 < n; ++j) {
            // G = p, F = -q
            const cplx G = 0.25 * (eta.p(j, k) + eta.p(j + 1, k) + eta.p(j, k + 1) + eta.p(j + 1, k + 1));
            const cplx F = -0.25 * (eta.q(j, k) + eta.q(j + 1, k) + eta.q(j, k + 1) + eta.q(j + 1, k + 1));
            if (G == 0.0 && F == 0.0) continue;
            cplx P[4], Q[4];
            for (int t = 0; t < 4; ++t) {
                P[t] = W * G;
                Q[t] = W * F;
            }
            scatter(j, k, P, Q, y);
        }
    return y;
}

WeakSolution solve_weak(const BeltramiCoefficient& mu, const OneForm& eta, double tol, int max_iter,
                        Boundary boundary) {
    check_same_grid(mu.spec(), eta.p.spec);
    check_same_grid(eta.p.spec, eta.q.spec);
    if (!(tol > 0.0)) throw Error(ErrorCode::DomainError, "tolerance must be positive");
    check_eta_support(eta);

    const GridSpec& s = mu.spec();
    const int n = s.n;
    WeakOperator A(mu.mu);
    WeakSolution out;
    out.f = ComplexField(s);
    out.report.boundary = boundary;
    out.report.coercivity_used = (1.0 - mu.k) / (1.0 + mu.k);

    std::vector<cplx> r = A.rhs(eta);
    const double r0 = norm2(r);
    if (r0 == 0.0) return out;

    if (boundary == Boundary::free_space) {
        // Unknown f = G0 c lives on the whole lattice; A = A0 + A1 with A0 G0 = Id on
        // neutral charges, so A p = pc + A1 p when p = G0 pc.
        std::vector<cplx> xc(r.size(), 0.0);
        std::vector<cplx> z = lattice::apply_free_green(r, n);
        std::vector<cplx> pc = r, p = z;
        double rz = dot_re(r, z);
        int it = 0;
        double res = 1.0;
        for (; it < max_iter; ++it) {
            std::vector<cplx> Ap = A.apply(p, true);
            for (std::size_t i = 0; i < Ap.size(); ++i) Ap[i] += pc[i];
            const double alpha = rz / dot_re(p, Ap);
            for (std::size_t i = 0; i < r.size(); ++i) {
                xc[i] += alpha * pc[i];
                r[i] -= alpha * Ap[i];
            }
            res = norm2(r) / r0;
            if (res <= tol) {
                ++it;
                break;
            }
            z = lattice::apply_free_green(r, n);
            const double rzn = dot_re(r, z);
            const double beta = rzn / rz;
            rz = rzn;
            for (std::size_t i = 0; i < r.size(); ++i) {
                pc[i] = r[i] + beta * pc[i];
                p[i] = z[i] + beta * p[i];
            }
        }
        if (res > tol) throw Error(ErrorCode::NoConvergence, "weak solve stalled at " + std::to_string(res));
        out.f.data = lattice::apply_free_green(xc, n);
        out.report.iterations = it;
        out.report.final_residual = res;
    } else {
        std::vector<cplx> x(r.size(), 0.0);
        std::vector<cplx> z = neumann_precondition(r, n);
        std::vector<cplx> p = z;
        double rz = dot_re(r, z);
        int it = 0;
        double res = 1.0;
        for (; it < max_iter; ++it) {
            const std::vector<cplx> Ap = A.apply(p, false);
            const double alpha = rz / dot_re(p, Ap);
            for (std::size_t i = 0; i < r.size(); ++i) {
                x[i] += alpha * p[i];
                r[i] -= alpha * Ap[i];
            }
            res = norm2(r) / r0;
            if (res <= tol) {
                ++it;
                break;
            }
            z = neumann_precondition(r, n);
            const double rzn = dot_re(r, z);
            const double beta = rzn / rz;
            rz = rzn;
            for (std::size_t i = 0; i < r.size(); ++i) p[i] = z[i] + beta * p[i];
        }
        if (res > tol) throw Error(ErrorCode::NoConvergence, "weak solve stalled at " + std::to_string(res));
        out.f.data = std::move(x);
        out.report.iterations = it;
        out.report.final_residual = res;
    }
    remove_mean(out.f.data);
    return out;
}

cplx weak_functional(const ComplexField& v, const OneForm& eta, DerivMode mode) {
    const auto vz = wirtinger_dz(v, mode), vzb = wirtinger_dzbar(v, mode);
    cplx s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        s += eta.p.data[i] * std::conj(vz.data[i]) - eta.q.data[i] * std::conj(vzb.data[i]);
    const double h = v.spec.h();
    return s * h * h;
}

OneForm conjugate_form(const ComplexField& f, const ComplexField& mu, const OneForm& eta) {
    const auto mc = metric_coefficients(mu);
    const auto fz = wirtinger_dz(f), fzb = wirtinger_dzbar(f);
    OneForm w{ComplexField(f.spec), ComplexField(f.spec)};
    for (std::size_t i = 0; i < f.size(); ++i) {
        w.p.data[i] = mc.a[i] * fz.data[i] - std::conj(mc.b[i]) * fzb.data[i] - eta.p.data[i];
        w.q.data[i] = mc.b[i] * fz.data[i] - mc.a[i] * fzb.data[i] - eta.q.data[i];
    }
    return w;
}

ConjugateField conjugate_field(const ComplexField& f, const BeltramiCoefficient& mu, const OneForm& eta,
                               double tol_closed) {
    const auto w = conjugate_form(f, mu.mu, eta);
    auto ad = antiderivative(w, tol_closed);
    ConjugateField out;
    out.g = std::move(ad.g);
    out.closed_residual = ad.closed_residual;
    out.dz_residual = ad.dz_residual;
    out.dzbar_residual = ad.dzbar_residual;
    return out;
}

PsiResult build_psi(const BeltramiCoefficient& mu, const OneForm& eta, const VariationalOptions& opt) {
    auto weak = solve_weak(mu, eta, opt.tol, opt.max_iter, opt.boundary);
    auto conj_field = conjugate_field(weak.f, mu, eta, opt.tol_closed);
    PsiResult out;
    out.psi = weak.f + conj_field.g;
    out.closed_residual = conj_field.closed_residual;
    out.weak = weak.report;
    // Psi_zb - mu Psi_z = F + mu G
    ComplexField src(mu.spec());
    for (std::size_t i = 0; i < src.size(); ++i) src.data[i] = -eta.q.data[i] + mu.mu.data[i] * eta.p.data[i];
    const auto lhs = wirtinger_dzbar(out.psi) - mu.mu * wirtinger_dz(out.psi);
    const double den = l2_norm(src);
    out.residual = den > 0.0 ? l2_norm(lhs - src) / den : l2_norm(lhs);
    return out;
}

PsiResult build_psi(const BeltramiCoefficient& mu, const VariationalOptions& opt) {
    OneForm eta{ComplexField(mu.spec()), ComplexField(mu.spec())};
    // eta = -(mu_z) dzbar, i.e. G = 0 and F = mu_z
    eta.q = -1.0 * wirtinger_dz(mu.mu);
    return build_psi(mu, eta, opt);
}

QCMapSolution integrate_phi(const ComplexField& psi, const BeltramiCoefficient& mu, double tol_closed) {
    check_same_grid(psi.spec, mu.spec());
    OneForm alpha{ComplexField(psi.spec), ComplexField(psi.spec)};
    for (std::size_t i = 0; i < psi.size(); ++i) {
        const cplx e = std::exp(psi.data[i]);
        alpha.p.data[i] = e;
        alpha.q.data[i] = mu.mu.data[i] * e;
    }
    auto ad = antiderivative(alpha, tol_closed);
    QCMapSolution sol;
    sol.phi = std::move(ad.g);
    sol.phi_z = alpha.p;
    sol.phi_zbar = alpha.q;
    sol.closed_residual = ad.closed_residual;
    sol.jacobian.resize(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i) {
        sol.jacobian[i] = std::norm(alpha.p.data[i]) * (1.0 - std::norm(mu.mu.data[i]));
        if (!(sol.jacobian[i] > 0.0))
            throw Error(ErrorCode::NonPositiveJacobian, "Jacobian not positive at sample " + std::to_string(i));
    }
    sol.beltrami_residual = l2_norm(sol.phi_zbar - mu.mu * sol.phi_z) / l2_norm(sol.phi_z);
    sol.method = "variational";
    return sol;
}

QCMapSolution solve_variational(const BeltramiCoefficient& mu, const VariationalOptions& opt) {
    auto psi = build_psi(mu, opt);
    auto sol = integrate_phi(psi.psi, mu, opt.tol_closed);
    sol.iterations = psi.weak.iterations;
    sol.solver_residual = psi.weak.final_residual;
    return sol;
}

QCMapSolution normalize(const QCMapSolution& sol) {
    const cplx p0 = interpolate(sol.phi, 0.0);
    const cplx p1 = interpolate(sol.phi, 1.0);
    const cplx s = p1 - p0;
    if (!(std::abs(s) > 0.0)) throw Error(ErrorCode::DegenerateNormalization, "Phi(0) = Phi(1)");
    QCMapSolution out = sol;
    const cplx inv = 1.0 / s;
    for (std::size_t i = 0; i < out.phi.size(); ++i) {
        out.phi.data[i] = (sol.phi.data[i] - p0) * inv;
        if (!sol.phi_z.data.empty()) out.phi_z.data[i] = sol.phi_z.data[i] * inv;
        if (!sol.phi_zbar.data.empty()) out.phi_zbar.data[i] = sol.phi_zbar.data[i] * inv;
    }
    for (auto& J : out.jacobian) J *= std::norm(inv);
    return out;
}

FarField far_field_fit(const QCMapSolution& sol, const BeltramiCoefficient& mu) {
    const GridSpec& s = sol.phi.spec;
    if (mu.support_margin < s.n / 8) throw Error(ErrorCode::InvalidMu, "support margin below n/8");
    const int n = s.n;
    std::vector<std::pair<int, int>> ring;
    for (int t = 0; t < n; ++t) {
        ring.push_back({t, 0});
        ring.push_back({t, n - 1});
    }
    for (int t = 1; t < n - 1; ++t) {
        ring.push_back({0, t});
        ring.push_back({n - 1, t});
    }
    Eigen::MatrixXcd M(ring.size(), 3);
    Eigen::VectorXcd y(ring.size());
    for (std::size_t r = 0; r < ring.size(); ++r) {
        const cplx z = s.z(ring[r].first, ring[r].second);
        M(r, 0) = z;
        M(r, 1) = 1.0;
        M(r, 2) = 1.0 / z;
        y(r) = sol.phi(ring[r].first, ring[r].second);
    }
    const Eigen::VectorXcd c = M.colPivHouseholderQr().solve(y);
    FarField out;
    out.scale = c(0);
    cplx acc = 0.0;
    for (std::size_t r = 0; r < ring.size(); ++r) {
        const cplx z = s.z(ring[r].first, ring[r].second);
        acc += y(r) / out.scale - z;
    }
    out.b = acc / double(ring.size());
    for (std::size_t r = 0; r < ring.size(); ++r) {
        const cplx z = s.z(ring[r].first, ring[r].second);
        out.decay_defect = std::max(out.decay_defect, std::abs(y(r) / out.scale - z - out.b) * std::abs(z));
    }
    return out;
}

} // namespace qc
