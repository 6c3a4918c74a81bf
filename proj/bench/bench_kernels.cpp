// Serial reference path against the OpenMP path for the heavier kernels.

#include <benchmark/benchmark.h>

#include <random>

#include "curvlab/bergman.hpp"
#include "curvlab/positivity.hpp"
#include "curvlab/schur.hpp"

using namespace curvlab;

namespace {

Exec mode(const benchmark::State& s) { return s.range(0) ? Exec::parallel : Exec::serial; }

BiForm random_form(int n, int r, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    ComplexMatrix m(n * r, n * r);
    for (int i = 0; i < n * r; ++i)
        for (int j = 0; j < n * r; ++j) m(i, j) = cplx(g(rng), g(rng));
    return BiForm(n, r, HermitianMatrix(m));
}

void BM_Gram(benchmark::State& s) {
    const WeightFamily w = coupled_gaussian_family(1.0);
    const DomainGrid grid(24, 48);
    const ComplexVector t = ComplexVector::Zero(1);
    for (auto _ : s) benchmark::DoNotOptimize(gram(w, t, {12, 2}, grid, mode(s)));
}

void BM_RankKMin(benchmark::State& s) {
    const BiForm f = random_form(3, 4, 1);
    for (auto _ : s) benchmark::DoNotOptimize(rank_k_min({f, 2, 1e-8, 32, 500, 42, mode(s)}));
}

void BM_BruteForce(benchmark::State& s) {
    const BiForm f = random_form(3, 3, 2);
    for (auto _ : s) benchmark::DoNotOptimize(brute_force_min(f, 1, 20000, mode(s)));
}

void BM_SchurTrials(benchmark::State& s) {
    for (auto _ : s) benchmark::DoNotOptimize(verify_schur_positivity(10, {2, 2, 3}, 1, 42, mode(s)));
}

void BM_DualTrack(benchmark::State& s) {
    const WeightFamily w = degeneration_family(8, 1, [](cplx) { return ComplexMatrix::Identity(1, 1); });
    std::vector<double> ts;
    for (double t = -6; t <= -1; t += 0.25) ts.push_back(t);
    const ComplexMatrix h0 = ComplexMatrix::Identity(1, 1);
    const ComplexVector sigma = ComplexVector::Ones(1);
    for (auto _ : s) benchmark::DoNotOptimize(dual_norm_track(w, h0, sigma, ts, 12, 24, 32, mode(s)));
}

}  // namespace

// Argument 0 is the serial path, 1 the parallel one.
BENCHMARK(BM_Gram)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RankKMin)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BruteForce)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SchurTrials)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DualTrack)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
