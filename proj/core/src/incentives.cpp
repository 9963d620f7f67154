#include "tlmp/incentives.hpp"

#include "tlmp/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace tlmp {

std::string to_string(Direction d) {
    const char* side = d.side == BidSide::Generation ? "generation" : d.side == BidSide::Discharge ? "discharge" : "charge";
    return std::string(side) + (d.sign > 0 ? "+" : "-");
}

std::vector<Direction> esr_directions() {
    return {{BidSide::Discharge, +1}, {BidSide::Discharge, -1}, {BidSide::Charge, +1}, {BidSide::Charge, -1}};
}

ProfitBreakdown profit_under_bid(const Market& market, ParticipantRef who, const BidParameter& theta,
                                 const RollingDispatch& dispatched, const PriceSeries& truthful_prices) {
    ProfitBreakdown out;
    const auto r = static_cast<Eigen::Index>(who.index);
    for (std::size_t t = 0; t < dispatched.horizon(); ++t) {
        const auto tt = static_cast<Eigen::Index>(t);
        if (who.kind == ParticipantKind::Generator) {
            const auto& g = market.generators[who.index];
            out.surplus += (truthful_prices.generator(r, tt) - g.marginal_cost) * dispatched.generation(r, tt);
        } else {
            const auto& e = market.esrs[who.index];
            out.surplus += (truthful_prices.discharge(r, tt) - e.discharge_cost) * dispatched.discharge(r, tt);
            out.surplus += (e.charge_cost - truthful_prices.charge(r, tt)) * dispatched.charge(r, tt);
        }
    }
    if (truthful_prices.scheme == Scheme::RLmp) {
        out.loc = compute_loc(truthful_prices, dispatched, market, who, theta);
    } else {
        out.loc = compute_loc(extract_rtlmp(dispatched, market), dispatched, market, who, theta);
    }
    return out;
}

double PerturbationResult::mean() const {
    if (samples.empty()) return 0.0;
    double s = 0.0;
    for (const auto& x : samples) s += x.delta_profit;
    return s / static_cast<double>(samples.size());
}

double PerturbationResult::stddev() const {
    if (samples.size() < 2) return 0.0;
    const double m = mean();
    double s = 0.0;
    for (const auto& x : samples) s += (x.delta_profit - m) * (x.delta_profit - m);
    return std::sqrt(s / static_cast<double>(samples.size() - 1));
}

double PerturbationResult::max() const {
    double out = -std::numeric_limits<double>::infinity();
    for (const auto& x : samples) out = std::max(out, x.delta_profit);
    return samples.empty() ? 0.0 : out;
}

std::size_t PerturbationResult::dispatch_changes() const {
    return static_cast<std::size_t>(std::count_if(samples.begin(), samples.end(), [](const auto& x) { return x.dispatch_changed; }));
}

std::size_t PerturbationResult::degenerate_count() const {
    return static_cast<std::size_t>(std::count_if(samples.begin(), samples.end(), [](const auto& x) { return x.degenerate; }));
}

namespace {

bool same_dispatch(const RollingDispatch& a, const RollingDispatch& b, double tol) {
    auto close = [tol](const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
        return x.size() == 0 || (x - y).cwiseAbs().maxCoeff() <= tol;
    };
    return close(a.generation, b.generation) && close(a.discharge, b.discharge) && close(a.charge, b.charge);
}

}  // namespace

std::vector<PerturbationResult> perturbation_sweep(const Market& market, ParticipantRef who, double epsilon,
                                                   std::span<const Direction> directions,
                                                   std::span<const DemandScenario> scenarios,
                                                   std::span<const Scheme> schemes, std::size_t jobs) {
    const BidParameter truthful = truthful_bids(market);
    const std::size_t S = scenarios.size();
    const std::size_t D = directions.size();
    const std::size_t K = schemes.size();

    // samples[s][d * K + k]
    std::vector<std::vector<PerturbationSample>> per_scenario(S);
    parallel_for(S, jobs, [&](std::size_t s) {
        const auto& sc = scenarios[s];
        const Forecaster fc = make_forecaster(sc);
        const RollingDispatch base = roll_horizon(market, truthful, sc.realized, fc);
        std::vector<PriceSeries> prices;
        std::vector<double> base_profit;
        for (Scheme scheme : schemes) {
            prices.push_back(extract_prices(scheme, base, market));
            base_profit.push_back(profit_under_bid(market, who, truthful, base, prices.back()).profit());
        }
        auto& out = per_scenario[s];
        out.resize(D * K);
        for (std::size_t d = 0; d < D; ++d) {
            const BidParameter theta = shift_bid(truthful, directions[d].side, who.index, directions[d].sign * epsilon);
            const RollingDispatch moved = epsilon == 0.0 ? base : roll_horizon(market, theta, sc.realized, fc);
            const bool changed = !same_dispatch(base, moved, 1e-7);
            for (std::size_t k = 0; k < K; ++k) {
                const double p = profit_under_bid(market, who, theta, moved, prices[k]).profit();
                out[d * K + k] = {s, epsilon == 0.0 ? 0.0 : p - base_profit[k], changed, base.dual_degenerate()};
            }
        }
    });

    std::vector<PerturbationResult> results;
    for (std::size_t k = 0; k < K; ++k) {
        for (std::size_t d = 0; d < D; ++d) {
            PerturbationResult r;
            r.scheme = schemes[k];
            r.who = who;
            r.direction = directions[d];
            r.epsilon = epsilon;
            for (std::size_t s = 0; s < S; ++s) r.samples.push_back(per_scenario[s][d * K + k]);
            results.push_back(std::move(r));
        }
    }
    return results;
}

ConditionReport check_uniform_pricing_condition(const RollingDispatch& rolling, const Market& market, const BidParameter& bids) {
    ConditionReport best;
    best.degenerate = rolling.dual_degenerate();
    const std::size_t M = market.esrs.size();
    const std::size_t T = rolling.horizon();
    if (M < 2) return best;

    auto interior = [](double x, double cap) { return x > kMarginalTol * cap && x < cap * (1.0 - kMarginalTol); };
    auto discharge_marginal = [&](std::size_t i, std::size_t t) {
        return interior(rolling.discharge(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)), market.esrs[i].discharge_cap);
    };
    auto charge_marginal = [&](std::size_t i, std::size_t t) {
        return interior(rolling.charge(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)), market.esrs[i].charge_cap);
    };

    // soc_clear_from[i][t]: SOC of ESR i stays strictly inside its limits over t..T-1.
    std::vector<std::vector<bool>> soc_clear_from(M, std::vector<bool>(T + 1, true));
    for (std::size_t i = 0; i < M; ++i) {
        const auto& e = market.esrs[i];
        const double tol = kMarginalTol * std::max(1.0, e.soc_max - e.soc_min);
        for (std::size_t t = T; t-- > 0;) {
            const double s = rolling.soc(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t));
            soc_clear_from[i][t] = soc_clear_from[i][t + 1] && s > e.soc_min + tol && s < e.soc_max - tol;
        }
    }

    int best_score = -1;
    for (std::size_t i = 0; i < M; ++i) {
        for (std::size_t j = i + 1; j < M; ++j) {
            for (std::size_t t = 0; t < T; ++t) {
                const bool mi = discharge_marginal(i, t) || charge_marginal(i, t);
                const bool mj = discharge_marginal(j, t) || charge_marginal(j, t);
                bool distinct;
                if (mi && mj) {
                    const double bi = discharge_marginal(i, t) ? bids.discharge[i][t] : bids.charge[i][t];
                    const double bj = discharge_marginal(j, t) ? bids.discharge[j][t] : bids.charge[j][t];
                    distinct = std::abs(bi - bj) > 1e-9;
                } else {
                    distinct = std::abs(bids.discharge[i][t] - bids.discharge[j][t]) > 1e-9 &&
                               std::abs(bids.charge[i][t] - bids.charge[j][t]) > 1e-9;
                }
                const bool soc = soc_clear_from[i][t] && soc_clear_from[j][t];
                const int score = int(distinct) + int(mi && mj) + int(soc);
                if (score > best_score) {
                    best_score = score;
                    best.esr_i = i;
                    best.esr_j = j;
                    best.t_star = t;
                    best.distinct_costs = distinct;
                    best.both_marginal = mi && mj;
                    best.soc_interior = soc;
                    best.fired = score == 3;
                    if (best.fired) return best;
                }
            }
        }
    }
    return best;
}

UniformPriceVerdict uniform_price_impossibility(const RollingDispatch& rolling, const Market& market,
                                                const BidParameter& bids, PriceScope scope, double tol) {
    const std::size_t T = rolling.horizon();
    constexpr double kActive = 1e-6;  // MW or MWh
    LpBuilder b;
    std::vector<std::size_t> price(T);
    for (std::size_t t = 0; t < T; ++t) price[t] = b.add_variable(-kInfinity, kInfinity, 0.0);

    double scale = 1.0;
    auto add_row = [&](LpBuilder::Terms terms, double rhs) {
        terms.emplace_back(b.add_variable(0.0, kInfinity, 1.0), 1.0);
        terms.emplace_back(b.add_variable(0.0, kInfinity, 1.0), -1.0);
        b.add_eq_row(terms, rhs);
        scale = std::max(scale, std::abs(rhs));
    };
    auto optional_dual = [&](LpBuilder::Terms& terms, bool active, double coef) {
        if (active) terms.emplace_back(b.add_variable(0.0, kInfinity, 0.0), coef);
    };

    for (std::size_t i = 0; i < market.esrs.size(); ++i) {
        const auto& e = market.esrs[i];
        const auto ii = static_cast<Eigen::Index>(i);
        std::vector<std::size_t> psi(T);
        for (std::size_t t = 0; t < T; ++t) psi[t] = b.add_variable(-kInfinity, kInfinity, 0.0);
        for (std::size_t t = 0; t < T; ++t) {
            const auto tt = static_cast<Eigen::Index>(t);
            const double gd = rolling.discharge(ii, tt), gc = rolling.charge(ii, tt), s = rolling.soc(ii, tt);
            // theta^D - pi = -psi / xi^D + z_l - z_u
            LpBuilder::Terms dis{{price[t], 1.0}, {psi[t], -1.0 / e.eff_discharge}};
            optional_dual(dis, gd <= kActive, 1.0);
            optional_dual(dis, gd >= e.discharge_cap - kActive, -1.0);
            add_row(dis, bids.discharge[i][t]);
            // pi - theta^C = xi^C psi + z_l - z_u
            LpBuilder::Terms chg{{price[t], -1.0}, {psi[t], e.eff_charge}};
            optional_dual(chg, gc <= kActive, 1.0);
            optional_dual(chg, gc >= e.charge_cap - kActive, -1.0);
            add_row(chg, -bids.charge[i][t]);
            // 0 = -psi_t + psi_{t+1} + omega_l - omega_u
            LpBuilder::Terms soc{{psi[t], -1.0}};
            if (t + 1 < T) soc.emplace_back(psi[t + 1], 1.0);
            optional_dual(soc, s <= e.soc_min + kActive, 1.0);
            optional_dual(soc, s >= e.soc_max - kActive, -1.0);
            add_row(soc, 0.0);
        }
    }

    if (scope == PriceScope::AllParticipants) {
        for (std::size_t n = 0; n < market.generators.size(); ++n) {
            const auto& g = market.generators[n];
            const auto nn = static_cast<Eigen::Index>(n);
            auto output = [&](std::size_t t) {
                return t == 0 ? g.initial_output : rolling.generation(nn, static_cast<Eigen::Index>(t - 1));
            };
            // Ramp duals of transition (t-1) -> t, present only where the ramp binds.
            std::vector<std::ptrdiff_t> up(T + 1, -1), down(T + 1, -1);
            for (std::size_t t = 0; t < T; ++t) {
                const double step = rolling.generation(nn, static_cast<Eigen::Index>(t)) - output(t);
                if (step >= g.ramp_up - kActive) up[t] = static_cast<std::ptrdiff_t>(b.add_variable(0.0, kInfinity, 0.0));
                if (-step >= g.ramp_down - kActive) down[t] = static_cast<std::ptrdiff_t>(b.add_variable(0.0, kInfinity, 0.0));
            }
            for (std::size_t t = 0; t < T; ++t) {
                const double x = rolling.generation(nn, static_cast<Eigen::Index>(t));
                // theta - pi = -(nu_up_t - nu_dn_t) + (nu_up_{t+1} - nu_dn_{t+1}) + z_l - z_u
                LpBuilder::Terms terms{{price[t], 1.0}};
                if (up[t] >= 0) terms.emplace_back(static_cast<std::size_t>(up[t]), -1.0);
                if (down[t] >= 0) terms.emplace_back(static_cast<std::size_t>(down[t]), 1.0);
                if (up[t + 1] >= 0) terms.emplace_back(static_cast<std::size_t>(up[t + 1]), 1.0);
                if (down[t + 1] >= 0) terms.emplace_back(static_cast<std::size_t>(down[t + 1]), -1.0);
                optional_dual(terms, x <= g.capacity_min + kActive, 1.0);
                optional_dual(terms, x >= g.capacity_max - kActive, -1.0);
                add_row(terms, bids.generator[n][t]);
            }
        }
    }

    UniformPriceVerdict verdict;
    if (b.num_vars() == T) {
        verdict.exists_zero_loc_price = true;
        verdict.witness = rolling.windows.empty() ? Eigen::VectorXd::Zero(static_cast<Eigen::Index>(T))
                                                  : extract_rlmp(rolling).demand;
        return verdict;
    }
    const LpSolution sol = solve_lp(b.build());
    if (!sol.optimal()) throw std::logic_error("uniform price feasibility LP is " + to_string(sol.status));
    verdict.residual = sol.objective_value;
    verdict.exists_zero_loc_price = sol.objective_value <= tol * scale;
    if (verdict.exists_zero_loc_price) verdict.witness = sol.x.head(static_cast<Eigen::Index>(T));
    return verdict;
}

}  // namespace tlmp
