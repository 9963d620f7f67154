#include "tlmp/dispatch.hpp"

#include <algorithm>
#include <cassert>
#include <string>

namespace tlmp {

PriorState initial_state(const Market& market) {
    PriorState s;
    for (const auto& g : market.generators) s.generation.push_back(g.initial_output);
    for (const auto& e : market.esrs) s.soc.push_back(e.soc_initial);
    return s;
}

WindowProblem build_window(const Market& market, const BidParameter& bids, std::size_t start, const PriorState& prior,
                           std::span<const double> forecasts) {
    const std::size_t N = market.generators.size();
    const std::size_t M = market.esrs.size();
    const std::size_t L = forecasts.size();
    if (L == 0) throw MalformedProblem("build_window: empty forecast window");
    if (prior.generation.size() != N || prior.soc.size() != M) {
        throw MalformedProblem("build_window: prior state does not match the market");
    }

    WindowLayout layout{start, L, N, M};
    LpBuilder b;
    for (std::size_t n = 0; n < N; ++n) {
        const auto& g = market.generators[n];
        for (std::size_t k = 0; k < L; ++k) b.add_variable(g.capacity_min, g.capacity_max, bids.generator.at(n).at(start + k));
    }
    for (std::size_t i = 0; i < M; ++i) {
        for (std::size_t k = 0; k < L; ++k) b.add_variable(0.0, market.esrs[i].discharge_cap, bids.discharge.at(i).at(start + k));
    }
    for (std::size_t i = 0; i < M; ++i) {
        for (std::size_t k = 0; k < L; ++k) b.add_variable(0.0, market.esrs[i].charge_cap, -bids.charge.at(i).at(start + k));
    }
    for (std::size_t i = 0; i < M; ++i) {
        for (std::size_t k = 0; k < L; ++k) b.add_variable(market.esrs[i].soc_min, market.esrs[i].soc_max, 0.0);
    }
    assert(b.num_vars() == layout.num_vars());

    for (std::size_t k = 0; k < L; ++k) {
        LpBuilder::Terms terms;
        for (std::size_t n = 0; n < N; ++n) terms.emplace_back(layout.gen(n, k), 1.0);
        for (std::size_t i = 0; i < M; ++i) {
            terms.emplace_back(layout.discharge(i, k), 1.0);
            terms.emplace_back(layout.charge(i, k), -1.0);
        }
        b.add_eq_row(terms, forecasts[k]);
    }
    // E_{k-1} + xi_C g^C_k - g^D_k / xi_D - E_k = 0
    for (std::size_t i = 0; i < M; ++i) {
        const auto& e = market.esrs[i];
        for (std::size_t k = 0; k < L; ++k) {
            LpBuilder::Terms terms{{layout.charge(i, k), e.eff_charge},
                                   {layout.discharge(i, k), -1.0 / e.eff_discharge},
                                   {layout.soc(i, k), -1.0}};
            double rhs = 0.0;
            if (k == 0) {
                rhs = -prior.soc[i];
            } else {
                terms.emplace_back(layout.soc(i, k - 1), 1.0);
            }
            b.add_eq_row(terms, rhs);
        }
    }
    for (std::size_t n = 0; n < N; ++n) {
        const auto& g = market.generators[n];
        for (std::size_t k = 0; k < L; ++k) {
            if (k == 0) {
                b.add_ub_row({{layout.gen(n, 0), 1.0}}, g.ramp_up + prior.generation[n]);
                b.add_ub_row({{layout.gen(n, 0), -1.0}}, g.ramp_down - prior.generation[n]);
            } else {
                b.add_ub_row({{layout.gen(n, k), 1.0}, {layout.gen(n, k - 1), -1.0}}, g.ramp_up);
                b.add_ub_row({{layout.gen(n, k - 1), 1.0}, {layout.gen(n, k), -1.0}}, g.ramp_down);
            }
        }
    }
    return {b.build(), layout};
}

WindowSolution solve_window(const WindowProblem& problem, const SolverOptions& options) {
    const auto& lay = problem.layout;
    const LpSolution sol = solve_lp(problem.lp, options);
    if (sol.status != LpStatus::Optimal) {
        throw InfeasibleWindow(lay.start, "window starting at interval " + std::to_string(lay.start + 1) + " is " +
                                              to_string(sol.status));
    }
    const auto N = static_cast<Eigen::Index>(lay.num_gen);
    const auto M = static_cast<Eigen::Index>(lay.num_esr);
    const auto L = static_cast<Eigen::Index>(lay.length);

    WindowSolution w;
    w.start = lay.start;
    w.length = lay.length;
    w.objective = sol.objective_value;
    w.degenerate = sol.degenerate();
    w.multiple_optima = sol.dual_degenerate;
    w.lambda_range = eq_dual_ranges(problem.lp, sol, {lay.balance_row(0)}).front();
    {
        const auto& r = w.lambda_range;
        const double mid = 0.5 * (std::min(std::abs(r.lo), 1e6) + std::min(std::abs(r.hi), 1e6));
        w.dual_degenerate = r.width() > kDualUniquenessTol * std::max(1.0, mid);
    }
    w.generation.resize(N, L);
    w.mu_up.resize(N, L);
    w.mu_down.resize(N, L);
    w.rho_gen_lower.resize(N, L);
    w.rho_gen_upper.resize(N, L);
    for (auto* m : {&w.discharge, &w.charge, &w.soc, &w.phi, &w.delta_lower, &w.delta_upper, &w.rho_dis_lower,
                    &w.rho_dis_upper, &w.rho_chg_lower, &w.rho_chg_upper}) {
        m->resize(M, L);
    }
    w.lambda.resize(L);
    w.demand = problem.lp.eq_rhs.head(L);

    auto at = [](const Eigen::VectorXd& v, std::size_t idx) { return v[static_cast<Eigen::Index>(idx)]; };
    for (Eigen::Index k = 0; k < L; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        w.lambda[k] = at(sol.y_eq, lay.balance_row(kk));
        for (Eigen::Index n = 0; n < N; ++n) {
            const auto nn = static_cast<std::size_t>(n);
            const auto j = lay.gen(nn, kk);
            w.generation(n, k) = at(sol.x, j);
            w.rho_gen_lower(n, k) = at(sol.z_lower, j);
            w.rho_gen_upper(n, k) = at(sol.z_upper, j);
            w.mu_up(n, k) = at(sol.y_ub, lay.ramp_up_row(nn, kk));
            w.mu_down(n, k) = at(sol.y_ub, lay.ramp_down_row(nn, kk));
        }
        for (Eigen::Index i = 0; i < M; ++i) {
            const auto ii = static_cast<std::size_t>(i);
            const auto jd = lay.discharge(ii, kk), jc = lay.charge(ii, kk), je = lay.soc(ii, kk);
            w.discharge(i, k) = at(sol.x, jd);
            w.charge(i, k) = at(sol.x, jc);
            w.soc(i, k) = at(sol.x, je);
            w.phi(i, k) = at(sol.y_eq, lay.soc_row(ii, kk));
            w.delta_lower(i, k) = at(sol.z_lower, je);
            w.delta_upper(i, k) = at(sol.z_upper, je);
            w.rho_dis_lower(i, k) = at(sol.z_lower, jd);
            w.rho_dis_upper(i, k) = at(sol.z_upper, jd);
            w.rho_chg_lower(i, k) = at(sol.z_lower, jc);
            w.rho_chg_upper(i, k) = at(sol.z_upper, jc);
            if (w.discharge(i, k) * w.charge(i, k) > kComplementarityTol) {
                throw ComplementarityViolated("ESR " + std::to_string(i) + " charges and discharges at interval " +
                                              std::to_string(lay.start + kk + 1));
            }
        }
    }
    return w;
}

bool RollingDispatch::degenerate() const {
    return std::any_of(windows.begin(), windows.end(), [](const WindowSolution& w) { return w.degenerate; });
}

bool RollingDispatch::dual_degenerate() const {
    return std::any_of(windows.begin(), windows.end(), [](const WindowSolution& w) { return w.dual_degenerate; });
}

RollingDispatch roll_horizon(const Market& market, const BidParameter& bids, std::span<const double> demand,
                             const Forecaster& forecaster, const SolverOptions& options) {
    const std::size_t T = demand.size();
    const std::size_t W = market.config.window;
    const auto N = static_cast<Eigen::Index>(market.generators.size());
    const auto M = static_cast<Eigen::Index>(market.esrs.size());
    if (T != market.config.horizon) {
        throw MalformedProblem("roll_horizon: demand has " + std::to_string(T) + " intervals, horizon is " +
                               std::to_string(market.config.horizon));
    }

    RollingDispatch r;
    r.demand.assign(demand.begin(), demand.end());
    r.initial = initial_state(market);
    r.generation.resize(N, static_cast<Eigen::Index>(T));
    r.discharge.resize(M, static_cast<Eigen::Index>(T));
    r.charge.resize(M, static_cast<Eigen::Index>(T));
    r.soc.resize(M, static_cast<Eigen::Index>(T));
    r.windows.reserve(T);

    PriorState state = r.initial;
    std::vector<double> window_demand;
    for (std::size_t t = 0; t < T; ++t) {
        const std::size_t L = std::min(W, T - t);
        window_demand.assign(L, 0.0);
        window_demand[0] = demand[t];
        for (std::size_t k = 1; k < L; ++k) window_demand[k] = forecaster(t, k);

        WindowSolution w = solve_window(build_window(market, bids, t, state, window_demand), options);
        const auto tt = static_cast<Eigen::Index>(t);
        r.generation.col(tt) = w.generation.col(0);
        r.discharge.col(tt) = w.discharge.col(0);
        r.charge.col(tt) = w.charge.col(0);
        r.soc.col(tt) = w.soc.col(0);
        for (Eigen::Index n = 0; n < N; ++n) state.generation[static_cast<std::size_t>(n)] = w.generation(n, 0);
        for (Eigen::Index i = 0; i < M; ++i) state.soc[static_cast<std::size_t>(i)] = w.soc(i, 0);
        r.windows.push_back(std::move(w));
    }
    return r;
}

WindowSolution static_dispatch(const Market& market, const BidParameter& bids, std::span<const double> demand,
                               const SolverOptions& options) {
    return solve_window(build_window(market, bids, 0, initial_state(market), demand), options);
}

double dispatch_cost(const Market& market, const BidParameter& bids, const RollingDispatch& rolling) {
    double cost = 0.0;
    for (std::size_t t = 0; t < rolling.horizon(); ++t) {
        const auto tt = static_cast<Eigen::Index>(t);
        for (std::size_t n = 0; n < market.generators.size(); ++n) {
            cost += bids.generator[n][t] * rolling.generation(static_cast<Eigen::Index>(n), tt);
        }
        for (std::size_t i = 0; i < market.esrs.size(); ++i) {
            const auto ii = static_cast<Eigen::Index>(i);
            cost += bids.discharge[i][t] * rolling.discharge(ii, tt) - bids.charge[i][t] * rolling.charge(ii, tt);
        }
    }
    return cost;
}

}  // namespace tlmp
