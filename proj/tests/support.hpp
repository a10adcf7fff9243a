#pragma once

#include <cmath>
#include <random>

#include "qcmap/grid.hpp"

namespace qc::test {

// 6th-order central Wirtinger derivatives; the 3-cell rim is left at zero
inline void wirtinger6(const ComplexField& f, ComplexField& dz, ComplexField& dzb) {
    const GridSpec& s = f.spec;
    const double h = s.h();
    constexpr double c[3] = {45.0 / 60, -9.0 / 60, 1.0 / 60};
    dz = ComplexField(s);
    dzb = ComplexField(s);
    for (int k = 3; k < s.n - 3; ++k)
        for (int j = 3; j < s.n - 3; ++j) {
            cplx fx = 0.0, fy = 0.0;
            for (int m = 1; m <= 3; ++m) {
                fx += c[m - 1] * (f(j + m, k) - f(j - m, k));
                fy += c[m - 1] * (f(j, k + m) - f(j, k - m));
            }
            fx /= h;
            fy /= h;
            dz(j, k) = 0.5 * (fx - I * fy);
            dzb(j, k) = 0.5 * (fx + I * fy);
        }
}

// |a - b| / |b| over cells at least 3 away from the rim
inline double interior_rel(const ComplexField& a, const ComplexField& b) {
    const int n = a.spec.n;
    double num = 0.0, den = 0.0;
    for (int k = 3; k < n - 3; ++k)
        for (int j = 3; j < n - 3; ++j) {
            num += std::norm(a(j, k) - b(j, k));
            den += std::norm(b(j, k));
        }
    return std::sqrt(num / den);
}

// pointwise random mu with |mu| <= k inside |x|,|y| < L/2, zero outside
inline ComplexField random_mu(const GridSpec& s, double k, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    ComplexField mu(s);
    for (int kk = 0; kk < s.n; ++kk)
        for (int j = 0; j < s.n; ++j) {
            const cplx z = s.z(j, kk);
            if (std::abs(z.real()) >= s.L / 2 || std::abs(z.imag()) >= s.L / 2) continue;
            mu(j, kk) = std::polar(k * std::sqrt(U(rng)), 2.0 * M_PI * U(rng));
        }
    return mu;
}

// sum of four polynomial bumps (1 - |z - z0|^2 / r^2)^4 with random complex weights
inline ComplexField random_bumps(const GridSpec& s, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    ComplexField u(s);
    for (int m = 0; m < 4; ++m) {
        const cplx c(U(rng), U(rng));
        const cplx z0(0.5 * U(rng), 0.5 * U(rng));
        const double r = 0.55 + 0.25 * U(rng);
        for (int k = 0; k < s.n; ++k)
            for (int j = 0; j < s.n; ++j) {
                const double t = 1.0 - std::norm(s.z(j, k) - z0) / (r * r);
                if (t > 0.0) u(j, k) += c * t * t * t * t;
            }
    }
    return u;
}

inline OneForm random_form(const GridSpec& s, std::mt19937_64& rng) {
    std::normal_distribution<double> N;
    OneForm w{ComplexField(s), ComplexField(s)};
    for (std::size_t i = 0; i < w.p.size(); ++i) {
        w.p.data[i] = {N(rng), N(rng)};
        w.q.data[i] = {N(rng), N(rng)};
    }
    return w;
}

} // namespace qc::test
