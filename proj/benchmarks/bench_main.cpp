#include <benchmark/benchmark.h>

#include <random>

#include "hfm/diagrams.hpp"
#include "hfm/dispersion.hpp"
#include "hfm/linalg.hpp"
#include "hfm/quadrature.hpp"
#include "hfm/spinwave.hpp"
#include "hfm/wick.hpp"

namespace {

hfm::matrix random_symmetric(std::size_t n) {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g;
    hfm::matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) m(i, j) = m(j, i) = g(rng);
    return m;
}

void bm_eigh(benchmark::State& state) {
    const auto m = random_symmetric(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(hfm::eigh(m));
}
BENCHMARK(bm_eigh)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void bm_left_f1f2(benchmark::State& state) {
    const hfm::periodic_grid g(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(hfm::left_f1f2(g, 8.0, 2, 1));
}
BENCHMARK(bm_left_f1f2)->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

void bm_leading_quadrature(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(hfm::leading_free_energy(3, 8.0));
}
BENCHMARK(bm_leading_quadrature)->Unit(benchmark::kMillisecond);

void bm_correction_quadrature(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(hfm::correction_integral(3, 8.0));
}
BENCHMARK(bm_correction_quadrature)->Unit(benchmark::kMillisecond);

void bm_wick_degree6(benchmark::State& state) {
    const hfm::lattice_spec spec{2, 4, hfm::boundary::dirichlet};
    const auto table = hfm::two_point(spec, 3.0);
    const hfm::wick_monomial m{hfm::cre(0), hfm::cre(5), hfm::cre(10), hfm::ann(1), hfm::ann(6), hfm::ann(11)};
    for (auto _ : state) benchmark::DoNotOptimize(hfm::wick_expectation(m, table));
}
BENCHMARK(bm_wick_degree6);

void bm_discrete_correction(benchmark::State& state) {
    const hfm::lattice_spec spec{3, static_cast<int>(state.range(0)), hfm::boundary::dirichlet};
    for (auto _ : state) benchmark::DoNotOptimize(hfm::discrete_correction_exact(spec, 2, 4.0, 1));
}
BENCHMARK(bm_discrete_correction)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
