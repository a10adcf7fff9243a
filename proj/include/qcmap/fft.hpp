#pragma once

#include <vector>

#include "qcmap/grid.hpp"

// Thin FFTW wrapper; plans are created once per size under a lock and
// executed on caller buffers (new-array execution is thread safe).
namespace qc::fft {

// in-place m x m transforms, row-major; backward is unnormalised
void forward(std::vector<cplx>& a, int m);
void backward(std::vector<cplx>& a, int m);

// in-place m x m DCT-II and its inverse DCT-III (unnormalised, FFTW REDFT10/01)
void dct2(std::vector<double>& a, int m);
void idct2(std::vector<double>& a, int m);

} // namespace qc::fft
