#include "qcmap/fft.hpp"

#include <fftw3.h>
#include <omp.h>

#include <map>
#include <mutex>
#include <utility>

namespace qc::fft {
namespace {

enum class Kind { fwd, bwd, dct, idct };

std::mutex plan_mutex;
std::map<std::pair<int, Kind>, fftw_plan> plans;

fftw_plan get_plan(int m, Kind kind) {
    std::lock_guard<std::mutex> lock(plan_mutex);
    static bool threads_ready = [] {
        fftw_init_threads();
        return true;
    }();
    (void)threads_ready;
    auto key = std::make_pair(m, kind);
    auto it = plans.find(key);
    if (it != plans.end()) return it->second;

    fftw_plan_with_nthreads(omp_get_max_threads());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan p = nullptr;
    const std::size_t len = std::size_t(m) * m;
    if (kind == Kind::fwd || kind == Kind::bwd) {
        auto* buf = fftw_alloc_complex(len);
        p = fftw_plan_dft_2d(m, m, buf, buf, kind == Kind::fwd ? FFTW_FORWARD : FFTW_BACKWARD, flags);
        fftw_free(buf);
    } else {
        auto* buf = fftw_alloc_real(len);
        auto r = kind == Kind::dct ? FFTW_REDFT10 : FFTW_REDFT01;
        p = fftw_plan_r2r_2d(m, m, buf, buf, r, r, flags);
        fftw_free(buf);
    }
    plans.emplace(key, p);
    return p;
}

void run_c2c(std::vector<cplx>& a, int m, Kind kind) {
    if (a.size() != std::size_t(m) * m) throw Error(ErrorCode::InvalidGrid, "fft buffer size mismatch");
    auto* d = reinterpret_cast<fftw_complex*>(a.data());
    fftw_execute_dft(get_plan(m, kind), d, d);
}

void run_r2r(std::vector<double>& a, int m, Kind kind) {
    if (a.size() != std::size_t(m) * m) throw Error(ErrorCode::InvalidGrid, "dct buffer size mismatch");
    fftw_execute_r2r(get_plan(m, kind), a.data(), a.data());
}

} // namespace

void forward(std::vector<cplx>& a, int m) { run_c2c(a, m, Kind::fwd); }
void backward(std::vector<cplx>& a, int m) { run_c2c(a, m, Kind::bwd); }
void dct2(std::vector<double>& a, int m) { run_r2r(a, m, Kind::dct); }
void idct2(std::vector<double>& a, int m) { run_r2r(a, m, Kind::idct); }

} // namespace qc::fft
