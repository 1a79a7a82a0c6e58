#include <benchmark/benchmark.h>

#include <random>

#include "isac/kernels.hpp"

using namespace isac;

namespace {

CVec random_cvec(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    CVec x(n);
    for (auto& v : x) v = {g(rng), g(rng)};
    return x;
}

struct AmbiguityInput {
    CVec x = random_cvec(400, 1);
    std::vector<long> lags;
    std::vector<double> doppler;
    AmbiguityInput() {
        for (long l = -64; l <= 64; ++l) lags.push_back(l);
        for (int d = -32; d <= 32; ++d) doppler.push_back(d / 800.0);
    }
};

template <RMat (*F)(const CVec&, const std::vector<long>&, const std::vector<double>&)>
void BM_ambiguity(benchmark::State& st) {
    const AmbiguityInput in;
    for (auto _ : st) benchmark::DoNotOptimize(F(in.x, in.lags, in.doppler));
}

template <CMat (*F)(const std::vector<CVec>&, const std::vector<CVec>&, std::size_t)>
void BM_pulse_compress(benchmark::State& st) {
    std::vector<CVec> echoes;
    for (std::size_t m = 0; m < 32; ++m) echoes.push_back(random_cvec(2560, 10 + m));
    const std::vector<CVec> ref{random_cvec(400, 2)};
    for (auto _ : st) benchmark::DoNotOptimize(F(echoes, ref, 2160));
}

template <CMat (*F)(const CMat&)>
void BM_cumulant(benchmark::State& st) {
    const std::size_t n = static_cast<std::size_t>(st.range(0));
    const CVec v = random_cvec(n * 2000, 3);
    CMat Z(n, 2000);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t t = 0; t < 2000; ++t) Z(i, t) = v[i * 2000 + t];
    for (auto _ : st) benchmark::DoNotOptimize(F(Z));
}

}  // namespace

BENCHMARK(BM_ambiguity<kernels::ambiguity_serial>)->Name("ambiguity/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ambiguity<kernels::ambiguity_parallel>)->Name("ambiguity/openmp")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_pulse_compress<kernels::pulse_compress_serial>)->Name("pulse_compress/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_pulse_compress<kernels::pulse_compress_parallel>)->Name("pulse_compress/openmp")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_cumulant<kernels::cumulant_operator_serial>)->Name("cumulant/serial")->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_cumulant<kernels::cumulant_operator_parallel>)->Name("cumulant/openmp")->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
