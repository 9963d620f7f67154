// One line per acceptance criterion; exit status is nonzero if any fails.

#include "oracles.hpp"
#include "tlmp/config.hpp"
#include "tlmp/parallel.hpp"
#include "tlmp/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <thread>

using namespace tlmp;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::size_t jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

RunConfig config(const char* name) { return load_config(oracle::config_dir() / name); }

// 1. Zero LOC under R-TLMP, timed on one thread.
Verdict zero_loc_under_tlmp() {
    auto cfg = config("case_study.json");
    cfg.experiment.scenarios = 500;
    cfg.experiment.schemes = {Scheme::RTlmp};
    const auto start = std::chrono::steady_clock::now();
    const auto outcomes = run_scenarios(cfg, true, 1);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    double worst = 0.0;
    std::size_t lps = 0;
    for (const auto& o : outcomes) {
        lps += o.rolling.windows.size();
        for (const auto& p : o.settlements.front().participants) worst = std::max(worst, std::abs(p.loc));
    }
    return {worst <= 1e-6 && secs <= 60.0,
            fmt("max |LOC| %.3g $ over %zu scenarios, %zu windows, %.1f s on one thread", worst, outcomes.size(), lps, secs)};
}

// Shared by criteria 2 and 5.
const std::vector<AuditRow>& audit_rows() {
    static const std::vector<AuditRow> rows = [] {
        auto cfg = config("appendix.json");
        cfg.experiment.scenarios = 500;
        cfg.experiment.horizons = {6, 12, 18, 24};
        return run_audit_rows(cfg, jobs());
    }();
    return rows;
}

// 2. Fired scenarios carry R-LMP uplift and admit no uniform zero-LOC price.
Verdict positive_loc_when_fired() {
    std::size_t fired = 0, degenerate = 0, with_loc = 0, infeasible = 0;
    double min_loc = std::numeric_limits<double>::infinity();
    for (const auto& r : audit_rows()) {
        if (!r.report.fired) continue;
        ++fired;
        if (r.report.degenerate) {
            ++degenerate;
            continue;
        }
        min_loc = std::min(min_loc, r.lmp_esr_loc);
        if (r.lmp_esr_loc >= 1e-4) ++with_loc;
        if (!r.verdict.exists_zero_loc_price) ++infeasible;
    }
    const std::size_t counted = fired - degenerate;
    const bool pass = counted > 0 && with_loc == counted && infeasible >= 0.99 * static_cast<double>(counted);
    return {pass, fmt("%zu fired (%zu degenerate excluded); ESR LOC >= 1e-4 in %zu/%zu (min %.3g $); "
                      "no uniform price in %zu/%zu",
                      fired, degenerate, with_loc, counted, counted ? min_loc : 0.0, infeasible, counted)};
}

// 3. Decoupling at R-TLMP.
Verdict decoupling() {
    auto cfg = config("case_study.json");
    const auto bids = truthful_bids(cfg.market);
    const std::size_t S = 100;
    std::vector<std::size_t> bad(S), checked(S);
    parallel_for(S, jobs(), [&](std::size_t s) {
        const auto sc = make_scenario(cfg, s);
        const auto r = roll_horizon(cfg.market, bids, sc.realized, make_scenario_forecaster(cfg, sc));
        bad[s] = check_decoupling(r, extract_rtlmp(r, cfg.market), cfg.market, bids).size();
        checked[s] = r.horizon() * (cfg.market.generators.size() + 2 * cfg.market.esrs.size());
    });
    std::size_t n_bad = 0, n = 0;
    for (std::size_t s = 0; s < S; ++s) n_bad += bad[s], n += checked[s];
    return {n_bad == 0, fmt("%zu/%zu participant-intervals are single-interval best responses", n - n_bad, n)};
}

// 4. Truthful bidding under R-TLMP; profitable deviations on average under R-LMP.
Verdict perturbation() {
    auto cfg = config("case_study.json");
    cfg.experiment.scenarios = 500;
    cfg.experiment.epsilon = 0.01;
    cfg.experiment.schemes = {Scheme::RLmp, Scheme::RTlmp};
    const auto results = run_perturbation(cfg, jobs());
    bool pass = true;
    std::string detail;
    for (const auto& r : results) {
        if (r.scheme == Scheme::RTlmp) {
            const bool ok = r.max() <= 1e-8;
            pass = pass && ok;
            detail += fmt("tlmp %s max %.2g; ", to_string(r.direction).c_str(), r.max());
            continue;
        }
        // R-LMP: degenerate scenarios are excluded from the mean.
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto& x : r.samples) {
            if (x.degenerate) continue;
            sum += x.delta_profit;
            ++n;
        }
        const double mean = n ? sum / static_cast<double>(n) : 0.0;
        const bool required = (r.direction == Direction{BidSide::Discharge, +1}) || (r.direction == Direction{BidSide::Charge, -1});
        if (required) pass = pass && n > 0 && mean > 0.0;
        detail += fmt("lmp %s mean %.3g (n=%zu, %zu degenerate excluded); ", to_string(r.direction).c_str(), mean, n,
                      r.degenerate_count());
    }
    detail.resize(detail.size() - 2);
    return {pass, detail};
}

// 5. Condition frequency across horizons.
Verdict condition_frequency() {
    std::map<std::size_t, std::pair<std::size_t, std::size_t>> by;  // horizon -> (fired, total)
    for (const auto& r : audit_rows()) {
        auto& [f, n] = by[r.horizon];
        f += r.report.fired ? 1 : 0;
        ++n;
    }
    double lo = 1.0, hi = 0.0;
    bool inside = true;
    std::string detail;
    for (const auto& [h, fn] : by) {
        const double frac = static_cast<double>(fn.first) / static_cast<double>(fn.second);
        inside = inside && frac > 0.0 && frac < 1.0;
        lo = std::min(lo, frac);
        hi = std::max(hi, frac);
        detail += fmt("T=%zu %.1f%%, ", h, 100.0 * frac);
    }
    const double spread = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    detail += fmt("spread %.1fx", spread);
    return {inside && spread >= 10.0, detail};
}

// 6. Solver against the vertex oracle.
Verdict solver_oracle() {
    std::mt19937_64 rng(20240601);
    std::size_t ok = 0;
    double worst_obj = 0.0, worst_gap = 0.0;
    std::size_t kkt_fail = 0;
    const std::size_t N = 1000;
    for (std::size_t i = 0; i < N; ++i) {
        const auto p = oracle::random_bounded_lp(rng);
        const auto s = solve_lp(p);
        const auto v = enumerate_vertices(p);
        if (!s.optimal() || v.best() == nullptr) continue;
        const double scale = std::max(1.0, std::abs(v.best()->objective));
        const double obj = std::abs(s.objective_value - v.best()->objective) / scale;
        const double gap = std::abs(s.objective_value - oracle::dual_objective(p, s)) / scale;
        const bool kkt = check_kkt(p, s, 1e-7).empty();
        worst_obj = std::max(worst_obj, obj);
        worst_gap = std::max(worst_gap, gap);
        kkt_fail += kkt ? 0 : 1;
        if (obj <= 1e-8 && gap <= 1e-8 && kkt) ++ok;
    }
    return {ok == N, fmt("%zu/%zu LPs agree; worst objective diff %.2g, worst duality gap %.2g, KKT failures %zu", ok, N,
                         worst_obj, worst_gap, kkt_fail)};
}

// 7. Forecast error variance of the random walk.
Verdict forecast_statistics() {
    const std::vector<double> mean(4, 100.0);
    const ForecastParams params{0.0, 0.006, false};
    const auto sc = realize(mean, params, 0);
    const double step2 = std::pow(0.006 * 100.0, 2);
    const std::size_t N = 100000;
    bool pass = true;
    std::string detail;
    for (std::size_t k = 1; k <= 3; ++k) {
        double s = 0.0, s2 = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double e = forecast(sc, 0, k, params.sigma_step, mix_seed(7, 1, i)) - sc.realized[k];
            s += e;
            s2 += e * e;
        }
        const double m = s / N;
        const double var = (s2 - N * m * m) / (N - 1);
        const double rel = var / (k * step2) - 1.0;
        pass = pass && std::abs(rel) <= 0.10;
        detail += fmt("k=%zu var/(k*s^2)-1 = %+.3f; ", k, rel);
    }
    detail.resize(detail.size() - 2);
    return {pass, detail};
}

// 8. Full window, perfect foresight: rolling equals one-shot.
Verdict rolling_equals_static() {
    std::mt19937_64 rng(8);
    std::size_t ok = 0;
    double worst = 0.0;
    const std::size_t N = 50;
    for (std::size_t i = 0; i < N; ++i) {
        const std::size_t T = 2 + i % 7;
        const Market m = oracle::random_market(rng, T);
        std::vector<double> d(T);
        for (auto& x : d) x = 5.0 + std::uniform_real_distribution<double>(0.0, 40.0)(rng);
        const auto bids = truthful_bids(m);
        const auto sc = realize(d, {0.0, 0.0, false}, i);
        const auto r = roll_horizon(m, bids, sc.realized, make_forecaster(sc));
        const auto s = static_dispatch(m, bids, d);
        const double rel = std::abs(dispatch_cost(m, bids, r) - s.objective) / std::max(1.0, std::abs(s.objective));
        worst = std::max(worst, rel);
        if (rel <= 1e-8) ++ok;
    }
    return {ok == N, fmt("%zu/%zu instances, worst relative gap %.2g", ok, N, worst)};
}

// 9. Toy: no uniform price vector on a $0.5 grid over [0, 60]^3 removes the uplift.
Verdict toy_impossibility() {
    const auto cfg = config("toy.json");
    const auto bids = truthful_bids(cfg.market);
    const auto sc = make_scenario(cfg, 0);
    const auto r = roll_horizon(cfg.market, bids, sc.realized, make_scenario_forecaster(cfg, sc));
    const std::size_t T = r.horizon();
    const std::size_t N = cfg.market.generators.size();
    std::vector<std::vector<Eigen::VectorXd>> vertices;
    for (const auto& g : cfg.market.generators) vertices.push_back(oracle::generator_plan_vertices(g, T));

    const std::size_t steps = 121;
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> argbest(T);
    std::vector<double> price(T);
    std::function<void(std::size_t)> sweep = [&](std::size_t t) {
        if (t == T) {
            double loc = 0.0;
            for (std::size_t n = 0; n < N; ++n) {
                const double q = oracle::generator_profit_oracle(vertices[n], price, bids.generator[n]);
                double followed = 0.0;
                for (std::size_t k = 0; k < T; ++k) {
                    followed += (price[k] - bids.generator[n][k]) * r.generation(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
                }
                loc += q - followed;
            }
            if (loc < best) best = loc, argbest = price;
            return;
        }
        for (std::size_t i = 0; i < steps; ++i) {
            price[t] = 0.5 * static_cast<double>(i);
            sweep(t + 1);
        }
    };
    sweep(0);
    const auto verdict = uniform_price_impossibility(r, cfg.market, bids, PriceScope::AllParticipants);
    return {best >= 1e-4 && !verdict.exists_zero_loc_price,
            fmt("dispatch t1 = (%.0f, %.0f); min total LOC on grid %.4g $ at (%.1f, %.1f, %.1f); LP oracle residual %.3g",
                r.generation(0, 0), r.generation(1, 0), best, argbest[0], argbest[1], argbest[2], verdict.residual)};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, Verdict (*)()>> criteria{
        {"zero LOC under R-TLMP", zero_loc_under_tlmp},
        {"positive R-LMP LOC when the uniform-pricing condition fires", positive_loc_when_fired},
        {"R-TLMP decouples into single-interval dispatch", decoupling},
        {"truthful-bidding perturbation", perturbation},
        {"condition frequency across horizons", condition_frequency},
        {"solver matches vertex enumeration", solver_oracle},
        {"forecast error variance", forecast_statistics},
        {"rolling with full window equals static dispatch", rolling_equals_static},
        {"toy: no uniform price removes LOC", toy_impossibility},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        std::printf("criterion %zu %s: %s: %s\n", i + 1, v.pass ? "PASS" : "FAIL", criteria[i].first, v.detail.c_str());
        std::fflush(stdout);
        failed += v.pass ? 0 : 1;
    }
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
