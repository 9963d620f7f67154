#include "oracles.hpp"
#include "tlmp/config.hpp"
#include "tlmp/pricing.hpp"

#include <gtest/gtest.h>

using namespace tlmp;

namespace {

GeneratorSpec gen(std::string name, double cap, double ramp, double cost, double g0) {
    GeneratorSpec g;
    g.name = std::move(name);
    g.capacity_max = cap;
    g.capacity_min = 0.0;
    g.ramp_up = g.ramp_down = ramp;
    g.marginal_cost = cost;
    g.initial_output = g0;
    return g;
}

Market two_generators(std::size_t T, double ramp1) {
    Market m;
    m.config.horizon = T;
    m.config.window = 2;
    m.generators = {gen("G1", 100.0, ramp1, 25.0, 50.0), gen("G2", 100.0, 100.0, 30.0, 0.0)};
    return m;
}

RollingDispatch run(const Market& m, const std::vector<double>& d) {
    return roll_horizon(m, truthful_bids(m), d, perfect_forecaster(d));
}

}  // namespace

TEST(Rlmp, SingleUnitNoBindingConstraints) {
    Market m;
    m.config.horizon = 3;
    m.config.window = 2;
    m.generators = {gen("G1", 100.0, 50.0, 25.0, 40.0)};
    const auto p = extract_rlmp(run(m, {40.0, 50.0, 45.0}));
    for (Eigen::Index t = 0; t < 3; ++t) {
        EXPECT_NEAR(p.demand[t], 25.0, 1e-9);
        EXPECT_NEAR(p.generator(0, t), 25.0, 1e-9);
    }
}

TEST(Rlmp, DemandAboveCheapCapacity) {
    Market m = two_generators(2, 100.0);
    m.generators[0].capacity_max = 60.0;
    const auto p = extract_rlmp(run(m, {50.0, 80.0}));
    EXPECT_NEAR(p.demand[0], 25.0, 1e-9);
    EXPECT_NEAR(p.demand[1], 30.0, 1e-9);
    EXPECT_NEAR(p.generator(0, 1), 30.0, 1e-9);  // uniform
}

TEST(Rlmp, MatchesResolvedBindingWindows) {
    auto cfg = load_config(oracle::config_dir() / "case_study.json");
    const auto bids = truthful_bids(cfg.market);
    const auto sc = make_scenario(cfg, 0);
    const auto r = roll_horizon(cfg.market, bids, sc.realized, make_scenario_forecaster(cfg, sc));
    const auto p = extract_rlmp(r);
    PriorState state = r.initial;
    for (std::size_t t = 0; t < r.horizon(); ++t) {
        const auto& w = r.windows[t];
        const std::vector<double> d(w.demand.data(), w.demand.data() + w.demand.size());
        const auto again = solve_window(build_window(cfg.market, bids, t, state, d));
        EXPECT_EQ(again.lambda[0], p.lambda[static_cast<Eigen::Index>(t)]);
        for (std::size_t n = 0; n < state.generation.size(); ++n) state.generation[n] = r.generation(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(t));
        for (std::size_t i = 0; i < state.soc.size(); ++i) state.soc[i] = r.soc(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t));
    }
}

TEST(Rtlmp, UnitEfficiencyGivesLambdaMinusPhi) {
    auto cfg = load_config(oracle::config_dir() / "case_study.json");
    const auto sc = make_scenario(cfg, 1);
    const auto r = roll_horizon(cfg.market, truthful_bids(cfg.market), sc.realized, make_scenario_forecaster(cfg, sc));
    const auto p = extract_rtlmp(r, cfg.market);
    for (Eigen::Index t = 0; t < p.lambda.size(); ++t) {
        EXPECT_DOUBLE_EQ(p.discharge(0, t), p.lambda[t] - p.phi(0, t));
        EXPECT_DOUBLE_EQ(p.charge(0, t), p.lambda[t] - p.phi(0, t));
        if (p.phi(0, t) == 0.0) EXPECT_EQ(p.discharge(0, t), p.lambda[t]);
        EXPECT_EQ(p.demand[t], p.lambda[t]);
    }
}

TEST(Rtlmp, EfficienciesScalePhi) {
    Market m;
    m.config.horizon = 3;
    m.config.window = 3;
    m.generators = {gen("G1", 100.0, 100.0, 20.0, 10.0)};
    EsrSpec e;
    e.name = "B";
    e.discharge_cap = e.charge_cap = 5.0;
    e.soc_max = 5.0;
    e.soc_initial = 5.0;
    e.eff_discharge = 0.8;
    e.eff_charge = 0.9;
    e.discharge_cost = 1.0;
    e.charge_cost = 0.5;
    m.esrs.push_back(e);
    const auto r = run(m, {10.0, 12.0, 11.0});
    const auto p = extract_rtlmp(r, m);
    for (Eigen::Index t = 0; t < 3; ++t) {
        EXPECT_DOUBLE_EQ(p.discharge(0, t), p.lambda[t] - p.phi(0, t) / 0.8);
        EXPECT_DOUBLE_EQ(p.charge(0, t), p.lambda[t] - 0.9 * p.phi(0, t));
    }
}

TEST(Rtlmp, RampingPriceFromWindowDuals) {
    // G1 can only climb 10 MW per interval, so the peaker sets lambda and the
    // up-ramp into each interval binds.
    const Market m = two_generators(3, 10.0);
    const auto r = run(m, {65.0, 80.0, 90.0});
    const auto p = extract_rtlmp(r, m);
    bool saw_binding = false;
    for (std::size_t t = 0; t < 3; ++t) {
        const auto& w = r.windows[t];
        const double out_of = w.length > 1 ? w.mu_up(0, 1) - w.mu_down(0, 1) : 0.0;
        const double expect = w.lambda[0] - (w.mu_up(0, 0) - w.mu_down(0, 0)) + out_of;
        EXPECT_NEAR(p.generator(0, static_cast<Eigen::Index>(t)), expect, 1e-12);
        if (w.mu_up(0, 0) > 1e-9) saw_binding = true;
    }
    EXPECT_TRUE(saw_binding);
    // G1 is paid its own cost at the binding ramp, not the peaker's price.
    EXPECT_NEAR(p.lambda[1], 30.0, 1e-9);
    EXPECT_LT(p.generator(0, 1), p.lambda[1] - 1e-9);
}

TEST(Decoupling, BestResponseGap) {
    EXPECT_DOUBLE_EQ(best_response_gap(30.0, 25.0, 0.0, 10.0, 10.0, 1e-7), 0.0);
    EXPECT_DOUBLE_EQ(best_response_gap(30.0, 25.0, 0.0, 10.0, 4.0, 1e-7), 6.0);
    EXPECT_DOUBLE_EQ(best_response_gap(20.0, 25.0, 1.0, 10.0, 4.0, 1e-7), 3.0);
    EXPECT_DOUBLE_EQ(best_response_gap(25.0, 25.0, 0.0, 10.0, 4.0, 1e-7), 0.0);
}

TEST(Decoupling, HoldsAtRtlmpOnCaseStudy) {
    auto cfg = load_config(oracle::config_dir() / "case_study.json");
    const auto bids = truthful_bids(cfg.market);
    for (std::size_t s = 0; s < 20; ++s) {
        const auto sc = make_scenario(cfg, s);
        const auto r = roll_horizon(cfg.market, bids, sc.realized, make_scenario_forecaster(cfg, sc));
        EXPECT_TRUE(check_decoupling(r, extract_rtlmp(r, cfg.market), cfg.market, bids).empty()) << "scenario " << s;
    }
}

TEST(Decoupling, FailsAtRlmpWhenRampBinds) {
    const Market m = two_generators(3, 10.0);
    const auto r = run(m, {65.0, 80.0, 90.0});
    const auto v = check_decoupling(r, extract_rlmp(r), m, truthful_bids(m));
    ASSERT_FALSE(v.empty());
    EXPECT_EQ(v.front().who.index, 0u);
}
