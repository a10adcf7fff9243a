#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "qcmap/error.hpp"

namespace qc {

using cplx = std::complex<double>;
inline constexpr cplx I{0.0, 1.0};

// Cell-centred square grid on [-L, L]^2. Sample (j, k) sits at
// (-L + (j+1/2) h) + i(-L + (k+1/2) h); storage is row-major, j fastest.
struct GridSpec {
    int n = 0;
    double L = 0.0;

    static GridSpec make(int n, double L);

    double h() const { return 2.0 * L / n; }
    std::size_t size() const { return std::size_t(n) * std::size_t(n); }
    std::size_t idx(int j, int k) const { return std::size_t(k) * n + j; }
    double x(int j) const { return -L + (j + 0.5) * h(); }
    cplx z(int j, int k) const { return {x(j), x(k)}; }
    // the cell whose centre is nearest to 0
    int origin() const { return n / 2; }

    bool operator==(const GridSpec& o) const { return n == o.n && L == o.L; }
};

struct ComplexField {
    GridSpec spec;
    std::vector<cplx> data;

    ComplexField() = default;
    explicit ComplexField(const GridSpec& s, cplx fill = 0.0) : spec(s), data(s.size(), fill) {}

    template <class F>
    static ComplexField sample(const GridSpec& s, F&& fn) {
        ComplexField out(s);
        for (int k = 0; k < s.n; ++k)
            for (int j = 0; j < s.n; ++j) out.data[s.idx(j, k)] = fn(s.z(j, k));
        return out;
    }

    cplx& operator()(int j, int k) { return data[spec.idx(j, k)]; }
    const cplx& operator()(int j, int k) const { return data[spec.idx(j, k)]; }
    std::size_t size() const { return data.size(); }
    bool all_finite() const;
};

// coefficient pair of p dz + q dzbar
struct OneForm {
    ComplexField p;
    ComplexField q;
};

enum class DerivMode { spectral, central };

// elementwise helpers
ComplexField operator+(const ComplexField& a, const ComplexField& b);
ComplexField operator-(const ComplexField& a, const ComplexField& b);
ComplexField operator*(const ComplexField& a, const ComplexField& b);
ComplexField operator*(cplx s, const ComplexField& a);
ComplexField conj(const ComplexField& a);
ComplexField coordinate(const GridSpec& s); // z itself
void check_same_grid(const GridSpec& a, const GridSpec& b);

ComplexField wirtinger_dz(const ComplexField& f, DerivMode mode = DerivMode::central);
ComplexField wirtinger_dzbar(const ComplexField& f, DerivMode mode = DerivMode::central);
OneForm exterior_d(const ComplexField& f, DerivMode mode = DerivMode::central);

double l2_norm(const ComplexField& f);
double sup_norm(const ComplexField& f);
cplx mean(const ComplexField& f);

// Lower bound on sup |f(z1)-f(z2)| / |z1-z2|^alpha from num_pairs seeded
// random pairs plus every nearest-neighbour pair.
double holder_seminorm(const ComplexField& f, double alpha, long num_pairs, std::uint64_t seed);

// |dzbar p - dz q| / (|p| + |q|)
double curl_residual(const OneForm& omega, DerivMode mode = DerivMode::central);

struct Antiderivative {
    ComplexField g;
    double closed_residual = 0.0; // curl_residual of the input
    double dz_residual = 0.0;     // |dz g - p| / (|p| + |q|)
    double dzbar_residual = 0.0;  // |dzbar g - q| / (|p| + |q|)
};

// dg = omega, g = 0 at the origin cell. Throws NotClosed.
Antiderivative antiderivative(const OneForm& omega, double tol_closed);

// bilinear interpolation between cell centres (clamped, extrapolating at the rim)
cplx interpolate(const ComplexField& f, cplx z);

} // namespace qc
