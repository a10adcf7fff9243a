#include "qcmap/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace qc {
namespace {

constexpr double pi = std::numbers::pi;

// int_0^X int_0^Y 1/r for X, Y >= 0
double quadrant_integral(double X, double Y) {
    if (X <= 0.0 || Y <= 0.0) return 0.0;
    return X * std::asinh(Y / X) + Y * std::asinh(X / Y);
}

double positive_rect(double a, double b, double c, double d) {
    return quadrant_integral(b, d) - quadrant_integral(a, d) - quadrant_integral(b, c) + quadrant_integral(a, c);
}

} // namespace

cplx kernel_S(cplx w, cplx z, cplx mu_w) {
    if (w == z) throw Error(ErrorCode::CoincidentPoints, "S(w,z) needs w != z");
    if (!(std::abs(mu_w) < 1.0)) throw Error(ErrorCode::InvalidMu, "|mu(w)| must be < 1");
    return 1.0 / (pi * (w - z + mu_w * std::conj(w - z)));
}

KernelSample kernel_sample(cplx w, cplx z, cplx mu_w, double k) {
    KernelSample s{w, z, kernel_S(w, z, mu_w), 0.0};
    s.bound_ratio = std::abs(s.value) * pi * (1.0 - k) * std::abs(w - z);
    return s;
}

ComplexField dbar_mu(const ComplexField& f, const ComplexField& mu, DerivMode mode) {
    return wirtinger_dzbar(f, mode) - mu * wirtinger_dz(f, mode);
}

ComplexField dbar_mu_star(const ComplexField& f, const ComplexField& mu, DerivMode mode) {
    return wirtinger_dzbar(f, mode) - wirtinger_dz(mu * f, mode);
}

double frozen_coefficient_residual(cplx w, cplx mu_w, double d, ProbeDerivative how) {
    if (!(d > 0.0)) throw Error(ErrorCode::DomainError, "probe spacing must be positive");
    const double r0 = std::max(1.0, 10.0 * d);
    double worst = 0.0;
    auto S = [&](cplx z) { return kernel_S(w, z, mu_w); };
    for (int p = 0; p < 16; ++p) {
        const cplx z = w + std::polar(r0, 2.0 * pi * (p + 0.25) / 16.0);
        cplx sz, szb;
        if (how == ProbeDerivative::analytic) {
            const cplx D = w - z + mu_w * std::conj(w - z);
            sz = 1.0 / (pi * D * D);
            szb = mu_w / (pi * D * D);
        } else {
            const cplx sx = (S(z + d) - S(z - d)) / (2.0 * d);
            const cplx sy = (S(z + I * d) - S(z - I * d)) / (2.0 * d);
            sz = 0.5 * (sx - I * sy);
            szb = 0.5 * (sx + I * sy);
        }
        worst = std::max(worst, std::abs(szb - mu_w * sz) * r0 * r0);
    }
    return worst;
}

CellIndex snap_interior(const GridSpec& s, cplx z) {
    const double h = s.h();
    const int j = int(std::floor((z.real() + s.L) / h));
    const int k = int(std::floor((z.imag() + s.L) / h));
    if (j < 1 || k < 1 || j > s.n - 2 || k > s.n - 2)
        throw Error(ErrorCode::PointOutsideGrid, "evaluation point needs an interior cell");
    return {j, k};
}

cplx green_identity_residual(const ComplexField& phi, const ComplexField& mu, cplx z_in) {
    check_same_grid(phi.spec, mu.spec);
    const GridSpec& s = phi.spec;
    const int n = s.n;
    const double h2 = s.h() * s.h();
    const auto c = snap_interior(s, z_in);
    const cplx z = s.z(c.j, c.k);
    const cplx muz = mu(c.j, c.k);
    const cplx muz_z = wirtinger_dz(mu)(c.j, c.k);

    // left side: d^{mu*} in z of S(w,z), integrated against phi(w)
    cplx lhs = 0.0;
    for (int l = 0; l < n; ++l)
        for (int m = 0; m < n; ++m) {
            if (l == c.k && m == c.j) continue;
            const cplx fw = phi(m, l);
            if (fw == 0.0) continue;
            const cplx w = s.z(m, l);
            const cplx D = w - z + mu(m, l) * std::conj(w - z);
            lhs += fw * ((mu(m, l) - muz) / (pi * D * D) - muz_z / (pi * D));
        }
    lhs *= h2;

    auto psi = [&](int jj, int kk) {
        const cplx zz = s.z(jj, kk);
        cplx acc = 0.0;
        for (int l = 0; l < n; ++l)
            for (int m = 0; m < n; ++m) {
                if (l == kk && m == jj) continue;
                const cplx fw = phi(m, l);
                if (fw == 0.0) continue;
                const cplx w = s.z(m, l);
                acc += fw / (pi * (w - zz + mu(m, l) * std::conj(w - zz)));
            }
        return acc * h2;
    };
    const double h = s.h();
    const cplx pE = psi(c.j + 1, c.k), pW = psi(c.j - 1, c.k), pN = psi(c.j, c.k + 1), pS = psi(c.j, c.k - 1);
    const cplx mE = mu(c.j + 1, c.k) * pE, mW = mu(c.j - 1, c.k) * pW;
    const cplx mN = mu(c.j, c.k + 1) * pN, mS = mu(c.j, c.k - 1) * pS;
    const cplx psi_zb = 0.5 * ((pE - pW) / (2 * h) + I * (pN - pS) / (2 * h));
    const cplx mupsi_z = 0.5 * ((mE - mW) / (2 * h) - I * (mN - mS) / (2 * h));
    return lhs - (phi(c.j, c.k) + psi_zb - mupsi_z);
}

cplx representation_reconstruct(const ComplexField& g, const ComplexField& F, const ComplexField& mu,
                                const ComplexField& rho, cplx w_in, double tol) {
    check_same_grid(g.spec, F.spec);
    check_same_grid(g.spec, mu.spec);
    check_same_grid(g.spec, rho.spec);
    const GridSpec& s = g.spec;
    const double pre = l2_norm(dbar_mu(g, mu) - F);
    const double scale = l2_norm(wirtinger_dz(g)) + l2_norm(wirtinger_dzbar(g)) + 1e-300;
    if (pre > tol * scale)
        throw Error(ErrorCode::PreconditionResidualTooLarge, "dbar_mu g differs from F by " + std::to_string(pre));

    const auto c = snap_interior(s, w_in);
    const cplx w = s.z(c.j, c.k);
    const cplx muw = mu(c.j, c.k);
    const auto mu_z = wirtinger_dz(mu);
    const auto rho_z = wirtinger_dz(rho);
    const auto rho_zb = wirtinger_dzbar(rho);
    const int n = s.n;
    cplx acc = 0.0;
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) {
            if (j == c.j && k == c.k) continue;
            const std::size_t i = s.idx(j, k);
            const cplx r = rho.data[i];
            if (r == 0.0 && rho_z.data[i] == 0.0 && rho_zb.data[i] == 0.0) continue;
            const cplx z = s.z(j, k);
            const cplx D = w - z + muw * std::conj(w - z);
            const cplx S = 1.0 / (pi * D);
            // d^{mu*}_z (rho S) with S_z = 1/(pi D^2), S_zb = mu_w/(pi D^2)
            const cplx dS = r * (muw - mu.data[i]) / (pi * D * D) +
                            S * (rho_zb.data[i] - mu_z.data[i] * r - mu.data[i] * rho_z.data[i]);
            acc += g.data[i] * dS + F.data[i] * r * S;
        }
    return acc * s.h() * s.h();
}

double inverse_distance_integral(double x0, double x1, double y0, double y1) {
    // split into the four sign quadrants and reflect
    auto pieces = [](double a, double b, double out[4]) {
        out[0] = std::max(a, 0.0);
        out[1] = std::max(b, 0.0);
        out[2] = std::max(-b, 0.0);
        out[3] = std::max(-a, 0.0);
    };
    double X[4], Y[4];
    pieces(x0, x1, X);
    pieces(y0, y1, Y);
    double total = 0.0;
    for (int sx = 0; sx < 2; ++sx)
        for (int sy = 0; sy < 2; ++sy) {
            const double a = X[2 * sx], b = X[2 * sx + 1], c = Y[2 * sy], d = Y[2 * sy + 1];
            if (b > a && d > c) total += positive_rect(a, b, c, d);
        }
    return total;
}

double riesz_potential(const ComplexField& u, double R, cplx w) {
    const GridSpec& s = u.spec;
    if (!(R > 0.0) || R > s.L) throw Error(ErrorCode::BallOutsideGrid, "B(0,R) must lie inside the box");
    const int n = s.n;
    const double h = s.h();
    const int jw = int(std::floor((w.real() + s.L) / h));
    const int kw = int(std::floor((w.imag() + s.L) / h));
    constexpr int sub = 16;
    double total = 0.0;
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) {
            const double v = std::abs(u(j, k));
            if (v == 0.0) continue;
            const double x0 = -s.L + j * h, y0 = -s.L + k * h;
            // fraction of the cell inside the disc
            const double fx = std::max({std::abs(x0), std::abs(x0 + h)});
            const double fy = std::max({std::abs(y0), std::abs(y0 + h)});
            const double nx = (x0 <= 0.0 && x0 + h >= 0.0) ? 0.0 : std::min(std::abs(x0), std::abs(x0 + h));
            const double ny = (y0 <= 0.0 && y0 + h >= 0.0) ? 0.0 : std::min(std::abs(y0), std::abs(y0 + h));
            double frac;
            if (fx * fx + fy * fy <= R * R)
                frac = 1.0;
            else if (nx * nx + ny * ny >= R * R)
                continue;
            else {
                int in = 0;
                for (int a = 0; a < sub; ++a)
                    for (int b = 0; b < sub; ++b) {
                        const double px = x0 + (a + 0.5) * h / sub, py = y0 + (b + 0.5) * h / sub;
                        in += px * px + py * py < R * R;
                    }
                frac = double(in) / (sub * sub);
            }
            double cell;
            if (std::abs(j - jw) <= 1 && std::abs(k - kw) <= 1)
                cell = inverse_distance_integral(x0 - w.real(), x0 + h - w.real(), y0 - w.imag(), y0 + h - w.imag());
            else
                cell = h * h / std::abs(w - s.z(j, k));
            total += v * frac * cell;
        }
    return total;
}

KernelBoundStats kernel_bound_check(const ComplexField& mu, long samples, std::uint64_t seed) {
    const GridSpec& s = mu.spec;
    const double k = sup_norm(mu);
    const auto mz = wirtinger_dz(mu);
    const auto mzb = wirtinger_dzbar(mu);
    double lip = 0.0, supz = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        lip = std::max(lip, std::abs(mz.data[i]) + std::abs(mzb.data[i]));
        supz = std::max(supz, std::abs(mz.data[i]));
    }
    const double Cii = (lip / ((1 - k) * (1 - k)) + supz / (1 - k)) / pi;
    constexpr double slack = 1.05;

    KernelBoundStats st;
    std::mt19937_64 rng(seed);
    const std::uint64_t N = s.size();
    for (long t = 0; t < samples; ++t) {
        const std::size_t a = rng() % N, b = rng() % N, c = rng() % N;
        if (a == b || b == c || a == c) continue;
        const cplx w = s.z(int(a % s.n), int(a / s.n)), z = s.z(int(b % s.n), int(b / s.n));
        const cplx w2 = s.z(int(c % s.n), int(c / s.n));
        ++st.samples;
        const auto ks = kernel_sample(w, z, mu.data[a], k);
        st.max_ratio_i = std::max(st.max_ratio_i, ks.bound_ratio);
        st.violations_i += ks.bound_ratio > 1.0 + 1e-12;

        const cplx D = w - z + mu.data[a] * std::conj(w - z);
        const cplx dstar = (mu.data[a] - mu.data[b]) / (pi * D * D) - mz.data[b] * ks.value;
        const double rii = Cii > 0.0 ? std::abs(dstar) * std::abs(w - z) / Cii : 0.0;
        st.max_ratio_ii = std::max(st.max_ratio_ii, rii);
        st.violations_ii += rii > slack;

        const double lhs = std::abs(1.0 / (w - z) - 1.0 / (w2 - z)) / pi;
        const double rhs = std::abs(w - w2) * (1.0 / std::norm(w - z) + 1.0 / std::norm(w2 - z)) / (2 * pi);
        const double rc = lhs / rhs;
        st.max_ratio_continuity = std::max(st.max_ratio_continuity, rc);
        st.violations_continuity += rc > 1.0 + 1e-12;
    }
    return st;
}

KernelBoundStats kernel_bound_check_random(double k, long samples, std::uint64_t seed) {
    if (!(k >= 0.0 && k < 1.0)) throw Error(ErrorCode::DomainError, "k must lie in [0,1)");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    KernelBoundStats st;
    for (long t = 0; t < samples; ++t) {
        const cplx w(4 * U(rng) - 2, 4 * U(rng) - 2), z(4 * U(rng) - 2, 4 * U(rng) - 2);
        const cplx m = std::polar(k * std::sqrt(U(rng)), 2 * pi * U(rng));
        if (w == z) continue;
        ++st.samples;
        const auto ks = kernel_sample(w, z, m, k);
        st.max_ratio_i = std::max(st.max_ratio_i, ks.bound_ratio);
        st.violations_i += ks.bound_ratio > 1.0 + 1e-12;
    }
    return st;
}

} // namespace qc
