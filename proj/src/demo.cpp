#include "qcmap/demo.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

namespace qc {

double Manufactured::bump(cplx z) {
    const double t = 1.0 - std::norm(z);
    return t > 0.0 ? t * t * t * t : 0.0;
}

cplx Manufactured::phi(cplx z) const { return z + c * bump(z); }

cplx Manufactured::phi_z(cplx z) const {
    const double t = 1.0 - std::norm(z);
    if (t <= 0.0) return 1.0;
    // d/dz (1-z zbar)^4 = -4 zbar (1-|z|^2)^3
    return 1.0 - 4.0 * c * std::conj(z) * t * t * t;
}

cplx Manufactured::phi_zbar(cplx z) const {
    const double t = 1.0 - std::norm(z);
    if (t <= 0.0) return 0.0;
    return -4.0 * c * z * t * t * t;
}

cplx Manufactured::phi_normalized(cplx z) const {
    const cplx p0 = phi(0.0), p1 = phi(1.0);
    return (phi(z) - p0) / (p1 - p0);
}

DemoMu DemoMu::parse(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ':')) parts.push_back(tok);
    if (parts.empty()) throw Error(ErrorCode::Usage, "empty demo name");
    auto num = [&](std::size_t i) {
        try {
            std::size_t used = 0;
            const double v = std::stod(parts.at(i), &used);
            if (used != parts[i].size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            throw Error(ErrorCode::Usage, "bad numeric parameter in demo '" + text + "'");
        }
    };
    DemoMu d;
    const std::string& name = parts[0];
    if (name == "zero" && parts.size() == 1) {
        d.kind = Kind::zero;
    } else if ((name == "radial_bump" || name == "rotating_bump") && (parts.size() == 3 || parts.size() == 5)) {
        d.kind = name == "radial_bump" ? Kind::radial_bump : Kind::rotating_bump;
        d.k = num(1);
        d.R = num(2);
        if (parts.size() == 5) d.centre = {num(3), num(4)};
        if (!(d.k >= 0.0 && d.k < 1.0) || !(d.R > 0.0)) throw Error(ErrorCode::Usage, "need 0 <= k < 1 and R > 0");
    } else if (name == "manufactured" && parts.size() == 2) {
        d.kind = Kind::manufactured;
        d.c = num(1);
        // |c B_z| <= 4c max r(1-r^2)^3 < 1 keeps Phi*_z away from 0
        if (!(std::abs(d.c) < 1.0)) throw Error(ErrorCode::Usage, "manufactured amplitude must satisfy |c| < 1");
    } else {
        throw Error(ErrorCode::Usage, "unknown demo '" + text + "'");
    }
    return d;
}

std::string DemoMu::name() const {
    std::ostringstream os;
    switch (kind) {
    case Kind::zero: os << "zero"; break;
    case Kind::radial_bump: os << "radial_bump:" << k << ':' << R; break;
    case Kind::rotating_bump: os << "rotating_bump:" << k << ':' << R; break;
    case Kind::manufactured: os << "manufactured:" << c; break;
    }
    if ((kind == Kind::radial_bump || kind == Kind::rotating_bump) && centre != 0.0)
        os << ':' << centre.real() << ':' << centre.imag();
    return os.str();
}

cplx DemoMu::value(cplx z) const {
    switch (kind) {
    case Kind::zero: return 0.0;
    case Kind::manufactured: return Manufactured{c}.mu(z);
    case Kind::radial_bump:
    case Kind::rotating_bump: {
        const double r2 = std::norm(z - centre) / (R * R);
        if (r2 >= 1.0) return 0.0;
        const double t = 1.0 - r2;
        const double v = k * t * t * t * t;
        if (kind == Kind::radial_bump) return v;
        return v * std::exp(I * std::numbers::pi * std::norm(z - centre));
    }
    }
    return 0.0;
}

ComplexField DemoMu::sample(const GridSpec& s) const {
    return ComplexField::sample(s, [this](cplx z) { return value(z); });
}

} // namespace qc
