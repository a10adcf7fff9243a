#pragma once

#include <iosfwd>
#include <string>

#include "qcmap/grid.hpp"

namespace qc {

// cgrid v1: "cgrid v1 <n> <L>" then n^2 lines "<re> <im>", 17 significant digits
void write_cgrid(std::ostream& os, const ComplexField& f);
void write_cgrid(const std::string& path, const ComplexField& f);
ComplexField read_cgrid(std::istream& is);
ComplexField read_cgrid(const std::string& path); // throws Io

} // namespace qc
