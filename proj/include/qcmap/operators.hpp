#pragma once

#include "qcmap/grid.hpp"

namespace qc {

enum class OpMethod { fft_freespace, direct_quadrature };
enum class SingularCell { analytic_correction, zero };

struct OperatorConfig {
    OpMethod method = OpMethod::fft_freespace;
    SingularCell singular_cell = SingularCell::analytic_correction;
    // Beurling only: pre-filter so that the discrete symbol has modulus <= 1.
    // Without it the lattice operator has norm about 1.094 near Nyquist.
    bool symbol_cap = true;
};

// Regularised lattice sum  sum'_{j in Z^2} (conj(j)/j)^2 exp(-eps^2 |j|^2), eps -> 0.
// It is the midpoint-rule defect of the Beurling kernel against f_zbarzbar.
inline constexpr double kZ4 = 1.5964226498;

inline constexpr int kDirectMaxN = 64;

struct OpDiagnostics {
    bool support_warning = false;
};

// true when the outer 2-cell ring is below rel * sup_norm(f)
bool compactly_supported(const ComplexField& f, int ring = 2, double rel = 1e-12);

// Tf(z) = (1/pi) int f(w) / (z - w) dA(w)
ComplexField cauchy_transform(const ComplexField& f, const OperatorConfig& cfg = {},
                              OpDiagnostics* diag = nullptr);

// Hf(z) = -(1/pi) pv int f(w) / (z - w)^2 dA(w), so that (Tf)_z = Hf
ComplexField beurling_transform(const ComplexField& f, const OperatorConfig& cfg = {},
                                OpDiagnostics* diag = nullptr);

// | |Hf| / |f| - 1 |; |Hf| is summed on a doubled box and the remainder outside
// it comes from the multipole expansion of Hf
double operator_isometry_defect(const ComplexField& f, const OperatorConfig& cfg = {});

struct OperatorCrossCheck {
    double cauchy = 0.0;
    double beurling = 0.0;
};

// relative L2 gap between FFT and direct quadrature (n <= 64)
OperatorCrossCheck cross_validate_operators(const ComplexField& f,
                                            SingularCell sc = SingularCell::analytic_correction);

} // namespace qc
