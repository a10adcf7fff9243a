#pragma once

#include <string>

#include "qcmap/grid.hpp"

namespace qc {

// Phi*(z) = z + c B(z), B = (1 - |z|^2)^4 on the unit disc, with its exact derivatives
struct Manufactured {
    double c = 0.3;

    static double bump(cplx z);
    cplx phi(cplx z) const;
    cplx phi_z(cplx z) const;
    cplx phi_zbar(cplx z) const;
    cplx mu(cplx z) const { return phi_zbar(z) / phi_z(z); }
    // (Phi* - Phi*(0)) / (Phi*(1) - Phi*(0)), exact
    cplx phi_normalized(cplx z) const;
};

struct DemoMu {
    enum class Kind { zero, radial_bump, rotating_bump, manufactured };
    Kind kind = Kind::zero;
    double k = 0.0;    // bump amplitude
    double R = 1.0;    // bump radius
    cplx centre = 0.0; // bump centre
    double c = 0.3;    // manufactured amplitude

    // "zero", "radial_bump:k:R[:cx:cy]", "rotating_bump:k:R[:cx:cy]", "manufactured:c"
    static DemoMu parse(const std::string& text);
    std::string name() const;
    cplx value(cplx z) const;
    ComplexField sample(const GridSpec& s) const;
    bool has_oracle() const { return kind == Kind::manufactured; }
    Manufactured oracle() const { return Manufactured{c}; }
};

} // namespace qc
