#include "qcmap/operators.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <tuple>

#include "qcmap/fft.hpp"
#include "qcmap/lattice_green.hpp"

namespace qc {
namespace {

constexpr double pi = std::numbers::pi;

enum class Kernel { cauchy, beurling };

cplx kernel_value(Kernel k, cplx zeta) {
    if (k == Kernel::cauchy) return 1.0 / (pi * zeta);
    return -1.0 / (pi * zeta * zeta);
}

// Spectrum of the kernel sampled on an M x M circular grid of offsets.
const std::vector<cplx>& kernel_spectrum(Kernel kind, int M, double h) {
    static std::mutex mtx;
    static std::map<std::tuple<int, int, double>, std::unique_ptr<std::vector<cplx>>> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_tuple(int(kind), M, h);
    auto it = cache.find(key);
    if (it != cache.end()) return *it->second;

    auto buf = std::make_unique<std::vector<cplx>>(std::size_t(M) * M);
    auto& b = *buf;
    for (int k = 0; k < M; ++k) {
        const int dk = k < M / 2 ? k : k - M;
        for (int j = 0; j < M; ++j) {
            const int dj = j < M / 2 ? j : j - M;
            b[std::size_t(k) * M + j] = (dj == 0 && dk == 0) ? 0.0 : kernel_value(kind, h * cplx(dj, dk));
        }
    }
    fft::forward(b, M);
    return *cache.emplace(key, std::move(buf)).first->second;
}

// full circular M x M output of the padded convolution, already scaled by h^2
std::vector<cplx> padded_convolution(const ComplexField& f, Kernel kind, int M) {
    const int n = f.spec.n;
    const double h = f.spec.h();
    std::vector<cplx> buf(std::size_t(M) * M, 0.0);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) buf[std::size_t(k) * M + j] = f(j, k);
    fft::forward(buf, M);
    const auto& K = kernel_spectrum(kind, M, h);
    const double scale = h * h / (double(M) * M);
    const long len = long(buf.size());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < len; ++i) buf[i] *= K[i] * scale;
    fft::backward(buf, M);
    return buf;
}

ComplexField direct_sum(const ComplexField& f, Kernel kind) {
    const GridSpec& s = f.spec;
    const int n = s.n;
    const double h2 = s.h() * s.h();
    ComplexField out(s);
    // serial reference: plain midpoint rule over all other cells
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) {
            cplx acc = 0.0;
            for (int l = 0; l < n; ++l)
                for (int m = 0; m < n; ++m) {
                    if (l == k && m == j) continue;
                    acc += f(m, l) * kernel_value(kind, s.h() * cplx(j - m, k - l));
                }
            out(j, k) = acc * h2;
        }
    return out;
}

// The correction is an O(h^2 k^2) symbol and would reach about 2 at the grid
// corners; it is rolled off smoothly before Nyquist.
double correction_damping(double rho2) { return std::exp(-rho2 * rho2 * rho2 * rho2); }

// Symbol of the midpoint lattice sum h^2 sum' K(h j) e^{-i theta.j} for the
// Beurling kernel, tabulated on a kSymM x kSymM grid of theta. The kernel is
// scale free, so one table serves every h. A smooth window at radius kSymM/4
// makes the sum absolutely convergent; for |theta| > pi/10 the table agrees
// with a 2x larger one to 1e-11. Closer to 0 it is only good to about 1e-2.
constexpr int kSymM = 1024;

const std::vector<cplx>& midpoint_beurling_symbol() {
    static std::vector<cplx> tab;
    static std::once_flag once;
    std::call_once(once, [] {
        const int M = kSymM;
        const double R = M / 4.0;
        tab.assign(std::size_t(M) * M, 0.0);
        for (int k = 0; k < M; ++k) {
            const int dk = k < M / 2 ? k : k - M;
            for (int j = 0; j < M; ++j) {
                const int dj = j < M / 2 ? j : j - M;
                if (dj == 0 && dk == 0) continue;
                const cplx z(dj, dk);
                const double r = std::abs(z) / R, r2 = r * r;
                tab[std::size_t(k) * M + j] = -1.0 / (pi * z * z) * std::exp(-r2 * r2 * r2 * r2);
            }
        }
        fft::forward(tab, M);
    });
    return tab;
}

// periodic bilinear lookup at theta = 2 pi (fx, fy) / n
cplx midpoint_symbol_at(int fx, int fy, int n) {
    const auto& tab = midpoint_beurling_symbol();
    const double u = double(fx) * kSymM / n, v = double(fy) * kSymM / n;
    const double fu = std::floor(u), fv = std::floor(v);
    const double a = u - fu, b = v - fv;
    auto at = [&](long j, long k) {
        j = ((j % kSymM) + kSymM) % kSymM;
        k = ((k % kSymM) + kSymM) % kSymM;
        return tab[std::size_t(k) * kSymM + std::size_t(j)];
    };
    const long j0 = long(fu), k0 = long(fv);
    return (1 - a) * (1 - b) * at(j0, k0) + a * (1 - b) * at(j0 + 1, k0) + (1 - a) * b * at(j0, k0 + 1) +
           a * b * at(j0 + 1, k0 + 1);
}

// Input filter P = min(1, 1/|sigma|), sigma the full discrete symbol of H
// (midpoint sum plus the singular-cell term). The midpoint sum alone peaks at
// 1.094 on the axes at Nyquist, which lets mu H expand for k above 0.91.
// At low frequency the correction leaves |sigma| - 1 = O((h k)^4), so P
// departs from 1 by 3e-4 at a fifth of Nyquist and by 1e-2 at half of it.
const std::vector<double>& symbol_cap(int n, SingularCell sc) {
    static std::mutex mtx;
    static std::map<std::pair<int, int>, std::unique_ptr<std::vector<double>>> cache;
    std::lock_guard<std::mutex> lock(mtx);
    const auto key = std::make_pair(n, int(sc));
    auto it = cache.find(key);
    if (it != cache.end()) return *it->second;
    auto buf = std::make_unique<std::vector<double>>(std::size_t(n) * n, 1.0);
    auto freq = [n](int j) { return j < n / 2 ? j : j - n; };
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) {
            const int fx = freq(j), fy = freq(k);
            // below a tenth of Nyquist the window spoils the table, while the
            // true excess of |sigma| over 1 is under 3e-5
            if (std::hypot(fx, fy) < 0.1 * (n / 2)) continue;
            cplx sig = midpoint_symbol_at(fx, fy, n);
            if (sc == SingularCell::analytic_correction && j != n / 2 && k != n / 2) {
                const double tx = 2.0 * pi * fx / n, ty = 2.0 * pi * fy / n;
                const cplx dz = 0.5 * cplx(ty, tx), dzb = 0.5 * cplx(-ty, tx);
                const double rho = std::hypot(tx, ty) / pi;
                sig += -(1.0 / (2.0 * pi)) * (dz * dz - kZ4 * dzb * dzb) * correction_damping(rho * rho);
            }
            const double a = std::abs(sig);
            if (a > 1.0) (*buf)[std::size_t(k) * n + j] = 1.0 / a;
        }
    return *cache.emplace(key, std::move(buf)).first->second;
}

ComplexField apply_cap(const ComplexField& f, SingularCell sc) {
    const int n = f.spec.n;
    const auto& P = symbol_cap(n, sc);
    std::vector<cplx> F = f.data;
    fft::forward(F, n);
    const double norm = 1.0 / (double(n) * n);
    for (std::size_t i = 0; i < F.size(); ++i) F[i] *= P[i] * norm;
    fft::backward(F, n);
    ComplexField out(f.spec);
    out.data = std::move(F);
    return out;
}

// local correction for the skipped singular cell, from the Taylor expansion of f
ComplexField singular_correction(const ComplexField& f, Kernel kind) {
    const GridSpec& s = f.spec;
    const int n = s.n;
    const double h = s.h();
    std::vector<cplx> F = f.data;
    fft::forward(F, n);
    const double w = 2.0 * pi / (n * h);
    auto freq = [n](int j) { return j == n / 2 ? 0 : (j < n / 2 ? j : j - n); };
    std::vector<cplx> A(F.size()), B(F.size());
    const double norm = 1.0 / (double(n) * n);
    for (int k = 0; k < n; ++k) {
        const double ky = w * freq(k);
        for (int j = 0; j < n; ++j) {
            const double kx = w * freq(j);
            const cplx dz = 0.5 * cplx(ky, kx);
            const cplx dzb = 0.5 * cplx(-ky, kx);
            const std::size_t i = std::size_t(k) * n + j;
            const double rho = std::hypot(kx, ky) * h / pi;
            const double r2 = rho * rho;
            const double damp = correction_damping(r2);
            if (kind == Kernel::cauchy) {
                A[i] = F[i] * dz * (norm * damp);
            } else {
                A[i] = F[i] * dz * dz * (norm * damp);
                B[i] = F[i] * dzb * dzb * (norm * damp);
            }
        }
    }
    fft::backward(A, n);
    ComplexField out(s);
    if (kind == Kernel::cauchy) {
        for (std::size_t i = 0; i < out.size(); ++i) out.data[i] = -(h * h / pi) * A[i];
        return out;
    }
    fft::backward(B, n);
    for (std::size_t i = 0; i < out.size(); ++i) out.data[i] = -(h * h / (2.0 * pi)) * (A[i] - kZ4 * B[i]);
    return out;
}

ComplexField apply(const ComplexField& f, Kernel kind, const OperatorConfig& cfg, OpDiagnostics* diag) {
    if (!f.all_finite()) throw Error(ErrorCode::NonFinite, "operator input is not finite");
    if (cfg.method == OpMethod::direct_quadrature && f.spec.n > kDirectMaxN)
        throw Error(ErrorCode::DirectQuadratureTooLarge, "direct quadrature limited to n <= 64");
    if (diag) diag->support_warning = !compactly_supported(f);
    if (kind == Kernel::beurling && cfg.symbol_cap) {
        OperatorConfig plain = cfg;
        plain.symbol_cap = false;
        return apply(apply_cap(f, cfg.singular_cell), kind, plain, nullptr);
    }

    ComplexField out(f.spec);
    if (cfg.method == OpMethod::direct_quadrature) {
        out = direct_sum(f, kind);
    } else {
        const int n = f.spec.n, M = 2 * n;
        auto buf = padded_convolution(f, kind, M);
        for (int k = 0; k < n; ++k)
            for (int j = 0; j < n; ++j) out(j, k) = buf[std::size_t(k) * M + j];
    }
    if (cfg.singular_cell == SingularCell::analytic_correction) {
        const auto corr = singular_correction(f, kind);
        for (std::size_t i = 0; i < out.size(); ++i) out.data[i] += corr.data[i];
    }
    return out;
}

double relative_gap(const ComplexField& a, const ComplexField& b) {
    const double den = l2_norm(b);
    const double num = l2_norm(a - b);
    return den > 0.0 ? num / den : num;
}

// int |Hf|^2 outside the square [-a,a]^2 from the multipole expansion
// Hf(z) = -(1/pi) sum_m (m+1) M_m z^-(m+2), M_m = int f w^m
double beurling_tail_sq(const ComplexField& f, double a) {
    constexpr int P = 24;
    const GridSpec& s = f.spec;
    const double h2 = s.h() * s.h();
    std::vector<cplx> c(P, 0.0);
    for (int k = 0; k < s.n; ++k)
        for (int j = 0; j < s.n; ++j) {
            const cplx v = f(j, k);
            if (v == 0.0) continue;
            const cplx w = s.z(j, k);
            cplx wm = 1.0;
            for (int m = 0; m < P; ++m, wm *= w) c[m] += v * wm * h2;
        }
    for (int m = 0; m < P; ++m) c[m] *= -double(m + 1) / pi;
    auto S = [&](cplx z) {
        cplx acc = 0.0, zi = 1.0 / z, p = zi * zi;
        for (int m = 0; m < P; ++m, p *= zi) acc += c[m] * p;
        return acc;
    };
    const double rho = a * std::sqrt(2.0);
    double out = 0.0;
    for (int m = 0; m < P; ++m) out += std::norm(c[m]) * 2.0 * pi * std::pow(rho, -2.0 * m - 2.0) / (2.0 * m + 2.0);
    // between the square and its circumcircle, octant by octant
    std::vector<double> x, w;
    lattice::gauss_legendre(24, x, w);
    for (int oct = 0; oct < 8; ++oct) {
        const double t0 = oct * pi / 4, t1 = t0 + pi / 4;
        for (std::size_t it = 0; it < x.size(); ++it) {
            const double th = 0.5 * (t0 + t1) + 0.5 * (t1 - t0) * x[it];
            const double r0 = a / std::max(std::abs(std::cos(th)), std::abs(std::sin(th)));
            double acc = 0.0;
            for (std::size_t ir = 0; ir < x.size(); ++ir) {
                const double r = 0.5 * (r0 + rho) + 0.5 * (rho - r0) * x[ir];
                acc += w[ir] * std::norm(S(std::polar(r, th))) * r;
            }
            out += w[it] * 0.5 * (t1 - t0) * acc * 0.5 * (rho - r0);
        }
    }
    return out;
}

} // namespace

bool compactly_supported(const ComplexField& f, int ring, double rel) {
    const int n = f.spec.n;
    double edge = 0.0;
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            if (j < ring || k < ring || j >= n - ring || k >= n - ring) edge = std::max(edge, std::abs(f(j, k)));
    return edge <= rel * sup_norm(f);
}

ComplexField cauchy_transform(const ComplexField& f, const OperatorConfig& cfg, OpDiagnostics* diag) {
    return apply(f, Kernel::cauchy, cfg, diag);
}

ComplexField beurling_transform(const ComplexField& f, const OperatorConfig& cfg, OpDiagnostics* diag) {
    return apply(f, Kernel::beurling, cfg, diag);
}

double operator_isometry_defect(const ComplexField& f, const OperatorConfig& cfg) {
    const double nf = l2_norm(f);
    if (nf == 0.0) throw Error(ErrorCode::ZeroInput, "isometry defect of the zero field");
    if (cfg.method == OpMethod::direct_quadrature) {
        // the reference path only sees the box itself, plus the tail beyond it
        const ComplexField g = cfg.symbol_cap ? apply_cap(f, cfg.singular_cell) : f;
        OperatorConfig plain = cfg;
        plain.symbol_cap = false;
        const double s = std::pow(l2_norm(beurling_transform(g, plain)), 2) + beurling_tail_sq(g, f.spec.L);
        return std::abs(std::sqrt(s) / nf - 1.0);
    }
    const int n = f.spec.n, M = 4 * n;
    const double h = f.spec.h();
    const ComplexField g = cfg.symbol_cap ? apply_cap(f, cfg.singular_cell) : f;
    auto buf = padded_convolution(g, Kernel::beurling, M);
    ComplexField corr(f.spec);
    if (cfg.singular_cell == SingularCell::analytic_correction) corr = singular_correction(g, Kernel::beurling);
    // doubled box: offsets -n/2 .. 3n/2 around the data block
    double s = 0.0;
    for (int k = -n / 2; k < 3 * n / 2; ++k)
        for (int j = -n / 2; j < 3 * n / 2; ++j) {
            cplx v = buf[std::size_t((k + M) % M) * M + (j + M) % M];
            if (j >= 0 && j < n && k >= 0 && k < n) v += corr(j, k);
            s += std::norm(v);
        }
    s = s * h * h + beurling_tail_sq(g, 2.0 * f.spec.L);
    return std::abs(std::sqrt(s) / nf - 1.0);
}

OperatorCrossCheck cross_validate_operators(const ComplexField& f, SingularCell sc) {
    if (f.spec.n > kDirectMaxN) throw Error(ErrorCode::DirectQuadratureTooLarge, "cross validation needs n <= 64");
    const OperatorConfig fast{OpMethod::fft_freespace, sc};
    const OperatorConfig slow{OpMethod::direct_quadrature, sc};
    OperatorCrossCheck r;
    r.cauchy = relative_gap(cauchy_transform(f, fast), cauchy_transform(f, slow));
    r.beurling = relative_gap(beurling_transform(f, fast), beurling_transform(f, slow));
    return r;
}

} // namespace qc
