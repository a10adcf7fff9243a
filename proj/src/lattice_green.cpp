#include "qcmap/lattice_green.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "qcmap/fft.hpp"

namespace qc::lattice {

void gauss_legendre(int order, std::vector<double>& x, std::vector<double>& w) {
    x.assign(order, 0.0);
    w.assign(order, 0.0);
    for (int i = 0; i < (order + 1) / 2; ++i) {
        double t = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= order; ++k) {
                const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = order * (t * p1 - p0) / (t * t - 1.0);
            const double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-16) break;
        }
        double p0 = 1.0, p1 = t;
        for (int k = 2; k <= order; ++k) {
            const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = order * (t * p1 - p0) / (t * t - 1.0);
        x[i] = -t;
        x[order - 1 - i] = t;
        w[i] = w[order - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
}

std::vector<double> potential_kernel_table(int N) {
    // a(m,n) = (1/pi) int_0^pi [1 - e^{-n t} cos(m theta)] / (2 sinh t) dtheta,
    // cosh t = 2 - cos theta. Written with s = sin(theta/2):
    // t = 2 asinh(s), 2 sinh t = 4 s sqrt(1 + s^2), no cancellation near 0.
    const double pi = std::numbers::pi;
    std::vector<double> gx, gw;
    gauss_legendre(20, gx, gw);

    // dyadic panels toward 0 (integrand has a 1/theta envelope), each cut so
    // that no panel spans more than ~1.5 periods of cos(N theta)
    const double wmax = 3.0 * pi / std::max(N, 8);
    std::vector<double> edges{0.0};
    double x = pi * std::ldexp(1.0, -50);
    edges.push_back(x);
    while (x < pi) {
        const double nx = std::min(2.0 * x, pi);
        const int pieces = std::max(1, int(std::ceil((nx - x) / wmax)));
        for (int p = 1; p <= pieces; ++p) edges.push_back(x + (nx - x) * p / pieces);
        x = nx;
    }

    std::vector<double> th, wt, tt, den, sig;
    for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
        const double a = edges[e], b = edges[e + 1];
        for (int i = 0; i < 20; ++i) {
            const double theta = 0.5 * (b - a) * gx[i] + 0.5 * (a + b);
            const double s = std::sin(0.5 * theta);
            th.push_back(theta);
            wt.push_back(0.5 * (b - a) * gw[i]);
            tt.push_back(2.0 * std::asinh(s));
            den.push_back(4.0 * s * std::sqrt(1.0 + s * s));
            sig.push_back(4.0 * s * s); // 2 - 2 cos theta
        }
    }
    const int nodes = int(th.size());

    std::vector<double> table(std::size_t(N) * N, 0.0);
#pragma omp parallel for schedule(dynamic, 4)
    for (int n = 0; n < N; ++n) {
        std::vector<double> acc(N, 0.0);
        double base = 0.0;
        for (int i = 0; i < nodes; ++i) {
            const double en = std::exp(-n * tt[i]);
            base += wt[i] * (-std::expm1(-n * tt[i])) / den[i];
            if (en < 1e-30) continue;
            const double c = wt[i] * en / den[i];
            // d_m = 1 - cos(m theta) by the small-angle stable recurrence
            double dprev = 0.0, d = 0.5 * sig[i];
            for (int m = 1; m < N; ++m) {
                acc[m] += c * d;
                const double dn = 2.0 * d - dprev + sig[i] * (1.0 - d);
                dprev = d;
                d = dn;
            }
        }
        for (int m = 0; m < N; ++m) table[std::size_t(n) * N + m] = (base + acc[m]) / pi;
    }
    return table;
}

namespace {

const std::vector<cplx>& green_spectrum(int n) {
    static std::mutex mtx;
    static std::map<int, std::unique_ptr<std::vector<cplx>>> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return *it->second;

    const int M = 2 * n;
    const int N = n + 1;
    const auto a = potential_kernel_table(N);
    auto buf = std::make_unique<std::vector<cplx>>(std::size_t(M) * M);
    for (int k = 0; k < M; ++k) {
        const int dk = std::abs(k < n ? k : k - M);
        for (int j = 0; j < M; ++j) {
            const int dj = std::abs(j < n ? j : j - M);
            (*buf)[std::size_t(k) * M + j] = -2.0 * a[std::size_t(dk) * N + dj];
        }
    }
    fft::forward(*buf, M);
    return *cache.emplace(n, std::move(buf)).first->second;
}

} // namespace

std::vector<cplx> apply_free_green(const std::vector<cplx>& c, int n) {
    const int M = 2 * n;
    const auto& K = green_spectrum(n);
    std::vector<cplx> buf(std::size_t(M) * M, 0.0);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) buf[std::size_t(k) * M + j] = c[std::size_t(k) * n + j];
    fft::forward(buf, M);
    const double scale = 1.0 / (double(M) * M);
    const long len = long(buf.size());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < len; ++i) buf[i] *= K[i] * scale;
    fft::backward(buf, M);
    std::vector<cplx> out(std::size_t(n) * n);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) out[std::size_t(k) * n + j] = buf[std::size_t(k) * M + j];
    return out;
}

} // namespace qc::lattice
