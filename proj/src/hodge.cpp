#include "qcmap/hodge.hpp"

#include <algorithm>
#include <cmath>

namespace qc {

int zero_margin(const ComplexField& f) {
    const int n = f.spec.n;
    for (int r = 0; r < (n + 1) / 2; ++r) {
        for (int t = r; t < n - r; ++t) {
            if (f(t, r) != 0.0 || f(t, n - 1 - r) != 0.0 || f(r, t) != 0.0 || f(n - 1 - r, t) != 0.0) return r;
        }
    }
    return n / 2;
}

BeltramiCoefficient BeltramiCoefficient::make(ComplexField mu) {
    if (!mu.all_finite()) throw Error(ErrorCode::InvalidMu, "mu is not finite");
    const double k = sup_norm(mu);
    if (!(k < 1.0)) throw Error(ErrorCode::InvalidMu, "sup |mu| = " + std::to_string(k) + " is not < 1");
    const int margin = zero_margin(mu);
    if (margin < mu.spec.n / 8)
        throw Error(ErrorCode::InvalidMu, "mu support reaches within " + std::to_string(margin) +
                                              " cells of the box edge (need n/8)");
    BeltramiCoefficient out;
    out.mu = std::move(mu);
    out.k = k;
    out.support_margin = margin;
    return out;
}

double MetricCoefficients::identity_defect(const ComplexField& mu) const {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double m = std::abs(mu.data[i]);
        const double ab = std::abs(b[i]);
        const double d1 = std::abs(a[i] * a[i] - ab * ab - 1.0) / (a[i] * a[i]);
        const double d2 = std::abs((a[i] - ab) - (1.0 - m) / (1.0 + m));
        worst = std::max({worst, d1, d2});
    }
    return worst;
}

MetricCoefficients metric_coefficients(const ComplexField& mu) {
    MetricCoefficients mc;
    mc.spec = mu.spec;
    mc.a.resize(mu.size());
    mc.b.resize(mu.size());
    mc.k = sup_norm(mu);
    if (!(mc.k < 1.0)) throw Error(ErrorCode::InvalidMu, "sup |mu| must be < 1");
    for (std::size_t i = 0; i < mu.size(); ++i) {
        const double m2 = std::norm(mu.data[i]);
        const double d = 1.0 - m2;
        mc.a[i] = (1.0 + m2) / d;
        mc.b[i] = 2.0 * mu.data[i] / d;
    }
    if (mc.identity_defect(mu) > 1e-12) throw Error(ErrorCode::InvalidMu, "metric identities violated");
    return mc;
}

MetricCoefficients metric_coefficients(const BeltramiCoefficient& mu) { return metric_coefficients(mu.mu); }

OneForm hodge_star_1form(const OneForm& omega, const MetricCoefficients& mc) {
    check_same_grid(omega.p.spec, omega.q.spec);
    check_same_grid(omega.p.spec, mc.spec);
    OneForm out{ComplexField(mc.spec), ComplexField(mc.spec)};
    for (std::size_t i = 0; i < mc.a.size(); ++i) {
        const cplx p = omega.p.data[i], q = omega.q.data[i];
        out.p.data[i] = -I * mc.a[i] * p + I * std::conj(mc.b[i]) * q;
        out.q.data[i] = -I * mc.b[i] * p + I * mc.a[i] * q;
    }
    return out;
}

OneForm d_mu(const ComplexField& f, const MetricCoefficients& mc, DerivMode mode) {
    const auto fz = wirtinger_dz(f, mode);
    const auto fzb = wirtinger_dzbar(f, mode);
    OneForm out{ComplexField(mc.spec), ComplexField(mc.spec)};
    for (std::size_t i = 0; i < mc.a.size(); ++i) {
        out.p.data[i] = 0.5 * ((1.0 - mc.a[i]) * fz.data[i] + std::conj(mc.b[i]) * fzb.data[i]);
        out.q.data[i] = 0.5 * ((1.0 + mc.a[i]) * fzb.data[i] - mc.b[i] * fz.data[i]);
    }
    return out;
}

ComplexField laplace_beltrami(const ComplexField& f, const MetricCoefficients& mc, DerivMode mode) {
    const auto fz = wirtinger_dz(f, mode);
    const auto fzb = wirtinger_dzbar(f, mode);
    // flux form: inner fields first, then the outer derivatives
    ComplexField u(mc.spec), v(mc.spec);
    for (std::size_t i = 0; i < mc.a.size(); ++i) {
        u.data[i] = I * mc.a[i] * fz.data[i] - I * std::conj(mc.b[i]) * fzb.data[i];
        v.data[i] = -I * mc.b[i] * fz.data[i] + I * mc.a[i] * fzb.data[i];
    }
    const auto div = wirtinger_dzbar(u, mode) + wirtinger_dz(v, mode);
    ComplexField out(mc.spec);
    for (std::size_t i = 0; i < mc.a.size(); ++i) {
        // 1 - |mu|^2 = 2 / (1 + a)
        const double vol = 2.0 / (1.0 + mc.a[i]);
        out.data[i] = -(2.0 / (I * vol)) * div.data[i];
    }
    return out;
}

std::vector<double> volume_density(const MetricCoefficients& mc) {
    std::vector<double> out(mc.a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = 2.0 / (1.0 + mc.a[i]);
    return out;
}

cplx mu_inner_product(const ComplexField& u, const ComplexField& v, const MetricCoefficients& mc, DerivMode mode) {
    const auto up = wirtinger_dz(u, mode), uq = wirtinger_dzbar(u, mode);
    const auto vp = wirtinger_dz(v, mode), vq = wirtinger_dzbar(v, mode);
    cplx s = 0.0;
    for (std::size_t i = 0; i < mc.a.size(); ++i) {
        const cplx cvp = std::conj(vp.data[i]), cvq = std::conj(vq.data[i]);
        s += mc.a[i] * (up.data[i] * cvp + uq.data[i] * cvq) - mc.b[i] * up.data[i] * cvq -
             std::conj(mc.b[i]) * uq.data[i] * cvp;
    }
    const double h = mc.spec.h();
    return s * h * h;
}

cplx wedge_integral(const OneForm& alpha, const OneForm& beta) {
    // dz ^ dzbar = -2i dx ^ dy
    cplx s = 0.0;
    for (std::size_t i = 0; i < alpha.p.size(); ++i)
        s += alpha.p.data[i] * beta.q.data[i] - alpha.q.data[i] * beta.p.data[i];
    const double h = alpha.p.spec.h();
    return -2.0 * I * s * h * h;
}

cplx wedge_star_form(const ComplexField& u, const ComplexField& v, const MetricCoefficients& mc, DerivMode mode) {
    const auto du = exterior_d(u, mode);
    const auto dvbar = exterior_d(conj(v), mode);
    return wedge_integral(du, hodge_star_1form(dvbar, mc));
}

double h_seminorm_sq(const ComplexField& u, DerivMode mode) {
    const double a = l2_norm(wirtinger_dz(u, mode));
    const double b = l2_norm(wirtinger_dzbar(u, mode));
    return a * a + b * b;
}

} // namespace qc
