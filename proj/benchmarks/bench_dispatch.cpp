#include "tlmp/config.hpp"
#include "tlmp/runner.hpp"

#include <benchmark/benchmark.h>

using namespace tlmp;

namespace {

const RunConfig& case_study() {
    static const RunConfig cfg = load_config(std::filesystem::path(TLMP_CONFIG_DIR) / "case_study.json");
    return cfg;
}

void BM_SolveWindow(benchmark::State& state) {
    const auto& cfg = case_study();
    const auto bids = truthful_bids(cfg.market);
    const std::vector<double> d(cfg.demand.mean.begin() + 17, cfg.demand.mean.begin() + 21);
    const auto problem = build_window(cfg.market, bids, 17, initial_state(cfg.market), d);
    for (auto _ : state) benchmark::DoNotOptimize(solve_window(problem));
}
BENCHMARK(BM_SolveWindow);

void BM_RollHorizon(benchmark::State& state) {
    const auto& cfg = case_study();
    const auto bids = truthful_bids(cfg.market);
    const auto sc = make_scenario(cfg, 0);
    const auto fc = make_scenario_forecaster(cfg, sc);
    for (auto _ : state) benchmark::DoNotOptimize(roll_horizon(cfg.market, bids, sc.realized, fc));
}
BENCHMARK(BM_RollHorizon);

void BM_SettleScenario(benchmark::State& state) {
    const auto& cfg = case_study();
    const auto bids = truthful_bids(cfg.market);
    const auto sc = make_scenario(cfg, 0);
    const auto r = roll_horizon(cfg.market, bids, sc.realized, make_scenario_forecaster(cfg, sc));
    for (auto _ : state) {
        benchmark::DoNotOptimize(settle(extract_rlmp(r), r, cfg.market, bids));
        benchmark::DoNotOptimize(settle(extract_rtlmp(r, cfg.market), r, cfg.market, bids));
    }
}
BENCHMARK(BM_SettleScenario);

}  // namespace
