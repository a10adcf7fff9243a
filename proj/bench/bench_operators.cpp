// FFT/OpenMP operators against the serial references.
#include <benchmark/benchmark.h>

#include "qcmap/demo.hpp"
#include "qcmap/operators.hpp"
#include "qcmap/variational.hpp"

namespace {

qc::ComplexField bump(int n) {
    return qc::DemoMu::parse("radial_bump:0.5:1.0:0.1:0").sample(qc::GridSpec::make(n, 2.0));
}

void cauchy(benchmark::State& st, qc::OpMethod m) {
    const auto f = bump(int(st.range(0)));
    qc::OperatorConfig cfg;
    cfg.method = m;
    (void)qc::cauchy_transform(f, cfg); // plans and kernel tables are cached
    for (auto _ : st) benchmark::DoNotOptimize(qc::cauchy_transform(f, cfg));
}

void beurling(benchmark::State& st, qc::OpMethod m) {
    const auto f = bump(int(st.range(0)));
    qc::OperatorConfig cfg;
    cfg.method = m;
    (void)qc::beurling_transform(f, cfg);
    for (auto _ : st) benchmark::DoNotOptimize(qc::beurling_transform(f, cfg));
}

void weak_apply(benchmark::State& st, bool serial) {
    const auto mu = qc::BeltramiCoefficient::make(bump(int(st.range(0))));
    const qc::WeakOperator A(mu.mu);
    const auto x = qc::DemoMu::parse("rotating_bump:0.9:1.5").sample(mu.spec());
    for (auto _ : st) benchmark::DoNotOptimize(serial ? A.apply_serial(x.data) : A.apply(x.data));
}

} // namespace

BENCHMARK_CAPTURE(cauchy, fft, qc::OpMethod::fft_freespace)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(cauchy, direct, qc::OpMethod::direct_quadrature)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(beurling, fft, qc::OpMethod::fft_freespace)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(beurling, direct, qc::OpMethod::direct_quadrature)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(weak_apply, openmp, false)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(weak_apply, serial, true)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
