#include "qcmap/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace qc {
namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

void write_cgrid(std::ostream& os, const ComplexField& f) {
    os << "cgrid v1 " << f.spec.n << ' ' << fmt17(f.spec.L) << '\n';
    for (const auto& v : f.data) os << fmt17(v.real()) << ' ' << fmt17(v.imag()) << '\n';
}

void write_cgrid(const std::string& path, const ComplexField& f) {
    std::ofstream os(path);
    if (!os) throw Error(ErrorCode::Io, "cannot open " + path + " for writing");
    write_cgrid(os, f);
    if (!os) throw Error(ErrorCode::Io, "write failed for " + path);
}

ComplexField read_cgrid(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw Error(ErrorCode::Io, "empty cgrid stream");
    std::istringstream head(line);
    std::string magic, version;
    long n = 0;
    double L = 0.0;
    if (!(head >> magic >> version >> n >> L) || magic != "cgrid" || version != "v1")
        throw Error(ErrorCode::Io, "bad cgrid header: " + line);
    GridSpec s;
    try {
        s = GridSpec::make(int(n), L);
    } catch (const Error& e) {
        throw Error(ErrorCode::Io, std::string("bad cgrid geometry: ") + e.what());
    }
    ComplexField f(s);
    for (std::size_t i = 0; i < f.size(); ++i) {
        // strtod keeps subnormals and exact round trip
        std::string re, im;
        if (!(is >> re >> im)) throw Error(ErrorCode::Io, "cgrid truncated at sample " + std::to_string(i));
        char* end = nullptr;
        const double a = std::strtod(re.c_str(), &end);
        if (*end) throw Error(ErrorCode::Io, "bad number '" + re + "'");
        const double b = std::strtod(im.c_str(), &end);
        if (*end) throw Error(ErrorCode::Io, "bad number '" + im + "'");
        f.data[i] = {a, b};
    }
    std::string extra;
    if (is >> extra) throw Error(ErrorCode::Io, "trailing data after cgrid samples");
    if (!f.all_finite()) throw Error(ErrorCode::Io, "cgrid contains non-finite samples");
    return f;
}

ComplexField read_cgrid(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error(ErrorCode::Io, "cannot open " + path);
    return read_cgrid(is);
}

} // namespace qc
