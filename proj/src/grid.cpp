#include "qcmap/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "qcmap/fft.hpp"

namespace qc {

const char* to_string(ErrorCode c) {
    switch (c) {
    case ErrorCode::InvalidGrid: return "InvalidGrid";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NotClosed: return "NotClosed";
    case ErrorCode::DirectQuadratureTooLarge: return "DirectQuadratureTooLarge";
    case ErrorCode::ZeroInput: return "ZeroInput";
    case ErrorCode::InvalidMu: return "InvalidMu";
    case ErrorCode::InvalidEta: return "InvalidEta";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NonPositiveJacobian: return "NonPositiveJacobian";
    case ErrorCode::DegenerateNormalization: return "DegenerateNormalization";
    case ErrorCode::DegenerateDerivative: return "DegenerateDerivative";
    case ErrorCode::CoincidentPoints: return "CoincidentPoints";
    case ErrorCode::PointOutsideGrid: return "PointOutsideGrid";
    case ErrorCode::PreconditionResidualTooLarge: return "PreconditionResidualTooLarge";
    case ErrorCode::BallOutsideGrid: return "BallOutsideGrid";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Usage: return "Usage";
    }
    return "Unknown";
}

GridSpec GridSpec::make(int n, double L) {
    if (n < 16 || n % 2 != 0) throw Error(ErrorCode::InvalidGrid, "n must be even and >= 16");
    if (!(L > 0.0) || !std::isfinite(L)) throw Error(ErrorCode::InvalidGrid, "L must be positive");
    return GridSpec{n, L};
}

bool ComplexField::all_finite() const {
    return std::all_of(data.begin(), data.end(),
                       [](cplx v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
}

void check_same_grid(const GridSpec& a, const GridSpec& b) {
    if (!(a == b)) throw Error(ErrorCode::InvalidGrid, "fields live on different grids");
}

namespace {

template <class Op>
ComplexField zip(const ComplexField& a, const ComplexField& b, Op op) {
    check_same_grid(a.spec, b.spec);
    ComplexField out(a.spec);
    for (std::size_t i = 0; i < a.size(); ++i) out.data[i] = op(a.data[i], b.data[i]);
    return out;
}

void require_finite(const ComplexField& f) {
    if (!f.all_finite()) throw Error(ErrorCode::NonFinite, "field contains non-finite samples");
}

// d/dx and d/dy, 2nd order everywhere
void central_partials(const ComplexField& f, std::vector<cplx>& fx, std::vector<cplx>& fy) {
    const int n = f.spec.n;
    const double h = f.spec.h();
    const double c = 1.0 / (2.0 * h);
    fx.assign(f.size(), 0.0);
    fy.assign(f.size(), 0.0);
    const auto& d = f.data;
#pragma omp parallel for schedule(static)
    for (int k = 0; k < n; ++k) {
        const std::size_t r = std::size_t(k) * n;
        for (int j = 1; j < n - 1; ++j) fx[r + j] = (d[r + j + 1] - d[r + j - 1]) * c;
        fx[r] = (-3.0 * d[r] + 4.0 * d[r + 1] - d[r + 2]) * c;
        fx[r + n - 1] = (3.0 * d[r + n - 1] - 4.0 * d[r + n - 2] + d[r + n - 3]) * c;
        for (int j = 0; j < n; ++j) {
            const std::size_t i = r + j;
            if (k == 0)
                fy[i] = (-3.0 * d[i] + 4.0 * d[i + n] - d[i + 2 * n]) * c;
            else if (k == n - 1)
                fy[i] = (3.0 * d[i] - 4.0 * d[i - n] + d[i - 2 * n]) * c;
            else
                fy[i] = (d[i + n] - d[i - n]) * c;
        }
    }
}

// multiply the spectrum by 1/2 (i kx -/+ ky); Nyquist modes dropped
ComplexField spectral_wirtinger(const ComplexField& f, bool conj_dir) {
    const int n = f.spec.n;
    const double h = f.spec.h();
    std::vector<cplx> buf = f.data;
    fft::forward(buf, n);
    const double w = 2.0 * std::numbers::pi / (n * h);
    auto freq = [n](int j) { return j == n / 2 ? 0 : (j < n / 2 ? j : j - n); };
    const double sgn = conj_dir ? -1.0 : 1.0;
    const double norm = 1.0 / (double(n) * n);
    for (int k = 0; k < n; ++k) {
        const double ky = k == n / 2 ? 0.0 : w * freq(k);
        for (int j = 0; j < n; ++j) {
            const double kx = j == n / 2 ? 0.0 : w * freq(j);
            const cplx sym = 0.5 * cplx(sgn * ky, kx);
            buf[std::size_t(k) * n + j] *= sym * norm;
        }
    }
    fft::backward(buf, n);
    ComplexField out(f.spec);
    out.data = std::move(buf);
    return out;
}

} // namespace

ComplexField operator+(const ComplexField& a, const ComplexField& b) {
    return zip(a, b, [](cplx x, cplx y) { return x + y; });
}
ComplexField operator-(const ComplexField& a, const ComplexField& b) {
    return zip(a, b, [](cplx x, cplx y) { return x - y; });
}
ComplexField operator*(const ComplexField& a, const ComplexField& b) {
    return zip(a, b, [](cplx x, cplx y) { return x * y; });
}
ComplexField operator*(cplx s, const ComplexField& a) {
    ComplexField out(a.spec);
    for (std::size_t i = 0; i < a.size(); ++i) out.data[i] = s * a.data[i];
    return out;
}
ComplexField conj(const ComplexField& a) {
    ComplexField out(a.spec);
    for (std::size_t i = 0; i < a.size(); ++i) out.data[i] = std::conj(a.data[i]);
    return out;
}
ComplexField coordinate(const GridSpec& s) {
    return ComplexField::sample(s, [](cplx z) { return z; });
}

ComplexField wirtinger_dz(const ComplexField& f, DerivMode mode) {
    require_finite(f);
    if (mode == DerivMode::spectral) return spectral_wirtinger(f, false);
    std::vector<cplx> fx, fy;
    central_partials(f, fx, fy);
    ComplexField out(f.spec);
    for (std::size_t i = 0; i < f.size(); ++i) out.data[i] = 0.5 * (fx[i] - I * fy[i]);
    return out;
}

ComplexField wirtinger_dzbar(const ComplexField& f, DerivMode mode) {
    require_finite(f);
    if (mode == DerivMode::spectral) return spectral_wirtinger(f, true);
    std::vector<cplx> fx, fy;
    central_partials(f, fx, fy);
    ComplexField out(f.spec);
    for (std::size_t i = 0; i < f.size(); ++i) out.data[i] = 0.5 * (fx[i] + I * fy[i]);
    return out;
}

OneForm exterior_d(const ComplexField& f, DerivMode mode) {
    return {wirtinger_dz(f, mode), wirtinger_dzbar(f, mode)};
}

double l2_norm(const ComplexField& f) {
    // sequential order keeps the sum reproducible
    double s = 0.0;
    for (const auto& v : f.data) s += std::norm(v);
    return std::sqrt(s) * f.spec.h();
}

double sup_norm(const ComplexField& f) {
    double m = 0.0;
    for (const auto& v : f.data) m = std::max(m, std::abs(v));
    return m;
}

cplx mean(const ComplexField& f) {
    cplx s = 0.0;
    for (const auto& v : f.data) s += v;
    return s / double(f.size());
}

double holder_seminorm(const ComplexField& f, double alpha, long num_pairs, std::uint64_t seed) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::DomainError, "holder exponent must lie in (0,1)");
    if (num_pairs < 1) throw Error(ErrorCode::DomainError, "num_pairs must be >= 1");
    const GridSpec& s = f.spec;
    const int n = s.n;
    const std::uint64_t N = s.size();
    auto quotient = [&](std::size_t a, std::size_t b) {
        const cplx za = s.z(int(a % n), int(a / n));
        const cplx zb = s.z(int(b % n), int(b / n));
        return std::abs(f.data[a] - f.data[b]) / std::pow(std::abs(za - zb), alpha);
    };

    double best = 0.0;
    // raw engine output keeps the pair stream identical across standard libraries
    std::mt19937_64 rng(seed);
    for (long p = 0; p < num_pairs; ++p) {
        const std::size_t a = rng() % N;
        const std::size_t b = rng() % N;
        if (a == b) continue;
        best = std::max(best, quotient(a, b));
    }
    double nn = 0.0;
#pragma omp parallel for reduction(max : nn) schedule(static)
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) {
            const std::size_t a = s.idx(j, k);
            if (j + 1 < n) nn = std::max(nn, quotient(a, a + 1));
            if (k + 1 < n) nn = std::max(nn, quotient(a, a + n));
        }
    return std::max(best, nn);
}

double curl_residual(const OneForm& omega, DerivMode mode) {
    check_same_grid(omega.p.spec, omega.q.spec);
    const auto defect = wirtinger_dzbar(omega.p, mode) - wirtinger_dz(omega.q, mode);
    return l2_norm(defect) / (l2_norm(omega.p) + l2_norm(omega.q) + 1e-300);
}

Antiderivative antiderivative(const OneForm& omega, double tol_closed) {
    check_same_grid(omega.p.spec, omega.q.spec);
    const double closed = curl_residual(omega);
    if (!(closed <= tol_closed))
        throw Error(ErrorCode::NotClosed, "curl residual " + std::to_string(closed) + " exceeds " +
                                              std::to_string(tol_closed));
    const GridSpec& s = omega.p.spec;
    const int n = s.n;
    const double hh = 0.5 * s.h();
    // dg = g_x dx + g_y dy with g_x = p + q, g_y = i (p - q)
    std::vector<cplx> gx(s.size()), gy(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        gx[i] = omega.p.data[i] + omega.q.data[i];
        gy[i] = I * (omega.p.data[i] - omega.q.data[i]);
    }
    ComplexField g(s);
    const int j0 = s.origin(), k0 = s.origin();
    for (int j = j0 + 1; j < n; ++j)
        g(j, k0) = g(j - 1, k0) + hh * (gx[s.idx(j, k0)] + gx[s.idx(j - 1, k0)]);
    for (int j = j0 - 1; j >= 0; --j)
        g(j, k0) = g(j + 1, k0) - hh * (gx[s.idx(j, k0)] + gx[s.idx(j + 1, k0)]);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < n; ++j) {
        for (int k = k0 + 1; k < n; ++k)
            g(j, k) = g(j, k - 1) + hh * (gy[s.idx(j, k)] + gy[s.idx(j, k - 1)]);
        for (int k = k0 - 1; k >= 0; --k)
            g(j, k) = g(j, k + 1) - hh * (gy[s.idx(j, k)] + gy[s.idx(j, k + 1)]);
    }

    Antiderivative out;
    const double scale = l2_norm(omega.p) + l2_norm(omega.q) + 1e-300;
    out.closed_residual = closed;
    out.dz_residual = l2_norm(wirtinger_dz(g) - omega.p) / scale;
    out.dzbar_residual = l2_norm(wirtinger_dzbar(g) - omega.q) / scale;
    out.g = std::move(g);
    return out;
}

cplx interpolate(const ComplexField& f, cplx z) {
    const GridSpec& s = f.spec;
    const double h = s.h();
    const double x = (z.real() + s.L) / h - 0.5;
    const double y = (z.imag() + s.L) / h - 0.5;
    const int j = std::clamp(int(std::floor(x)), 0, s.n - 2);
    const int k = std::clamp(int(std::floor(y)), 0, s.n - 2);
    const double tx = x - j, ty = y - k;
    return f(j, k) * (1 - tx) * (1 - ty) + f(j + 1, k) * tx * (1 - ty) + f(j, k + 1) * (1 - tx) * ty +
           f(j + 1, k + 1) * tx * ty;
}

} // namespace qc
