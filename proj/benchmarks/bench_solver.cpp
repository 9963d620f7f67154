#include "tlmp/solver.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace tlmp;

namespace {

// Dense random LP with a known interior point, n variables and n/2 equality rows.
LpProblem random_lp(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    LpBuilder b;
    std::vector<double> x0(n);
    for (std::size_t j = 0; j < n; ++j) {
        x0[j] = 5.0 + 4.0 * u(rng);
        b.add_variable(0.0, 10.0, u(rng));
    }
    for (std::size_t i = 0; i < n / 2; ++i) {
        LpBuilder::Terms t;
        double rhs = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double a = u(rng);
            t.emplace_back(j, a);
            rhs += a * x0[j];
        }
        b.add_eq_row(t, rhs);
    }
    return b.build();
}

void BM_SolveLp(benchmark::State& state) {
    const auto p = random_lp(static_cast<std::size_t>(state.range(0)), 1);
    for (auto _ : state) benchmark::DoNotOptimize(solve_lp(p));
}
BENCHMARK(BM_SolveLp)->Arg(8)->Arg(16)->Arg(32)->Arg(64);

void BM_EnumerateVertices(benchmark::State& state) {
    const auto p = random_lp(static_cast<std::size_t>(state.range(0)), 2);
    for (auto _ : state) benchmark::DoNotOptimize(enumerate_vertices(p));
}
BENCHMARK(BM_EnumerateVertices)->Arg(4)->Arg(6);

}  // namespace
