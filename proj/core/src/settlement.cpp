#include "tlmp/settlement.hpp"

#include <stdexcept>

namespace tlmp {

namespace {

Eigen::VectorXd slice(const Eigen::VectorXd& v, std::size_t offset, std::size_t len) {
    return v.segment(static_cast<Eigen::Index>(offset), static_cast<Eigen::Index>(len));
}

void require_length(std::size_t got, std::size_t want, const char* what) {
    if (got != want) throw MalformedProblem(std::string("self-schedule: ") + what + " has the wrong length");
}

}  // namespace

std::vector<double> matrix_row(const Eigen::MatrixXd& m, std::size_t index) {
    const auto r = static_cast<Eigen::Index>(index);
    std::vector<double> out(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index t = 0; t < m.cols(); ++t) out[static_cast<std::size_t>(t)] = m(r, t);
    return out;
}

SelfSchedule self_schedule_esr(std::span<const double> price_discharge, std::span<const double> price_charge,
                               const EsrSpec& esr, std::span<const double> bid_discharge,
                               std::span<const double> bid_charge) {
    const std::size_t T = price_discharge.size();
    require_length(price_charge.size(), T, "charge price");
    require_length(bid_discharge.size(), T, "discharge bid");
    require_length(bid_charge.size(), T, "charge bid");

    LpBuilder b;
    for (std::size_t t = 0; t < T; ++t) b.add_variable(0.0, esr.discharge_cap, bid_discharge[t] - price_discharge[t]);
    for (std::size_t t = 0; t < T; ++t) b.add_variable(0.0, esr.charge_cap, price_charge[t] - bid_charge[t]);
    for (std::size_t t = 0; t < T; ++t) b.add_variable(esr.soc_min, esr.soc_max, 0.0);
    for (std::size_t t = 0; t < T; ++t) {
        LpBuilder::Terms terms{{T + t, esr.eff_charge}, {t, -1.0 / esr.eff_discharge}, {2 * T + t, -1.0}};
        if (t > 0) terms.emplace_back(2 * T + t - 1, 1.0);
        b.add_eq_row(terms, t == 0 ? -esr.soc_initial : 0.0);
    }
    const LpSolution sol = solve_lp(b.build());
    if (!sol.optimal()) throw std::logic_error("ESR self-schedule LP is " + to_string(sol.status));

    SelfSchedule s;
    s.discharge = slice(sol.x, 0, T);
    s.charge = slice(sol.x, T, T);
    s.soc = slice(sol.x, 2 * T, T);
    s.profit = -sol.objective_value;
    s.psi = sol.y_eq;
    s.omega_lower = slice(sol.z_lower, 2 * T, T);
    s.omega_upper = slice(sol.z_upper, 2 * T, T);
    s.zeta_lower = slice(sol.z_lower, 0, 2 * T);
    s.zeta_upper = slice(sol.z_upper, 0, 2 * T);
    s.degenerate = sol.degenerate();
    return s;
}

SelfSchedule self_schedule_generator(std::span<const double> price, const GeneratorSpec& gen,
                                     std::span<const double> bid) {
    const std::size_t T = price.size();
    require_length(bid.size(), T, "bid");

    LpBuilder b;
    for (std::size_t t = 0; t < T; ++t) b.add_variable(gen.capacity_min, gen.capacity_max, bid[t] - price[t]);
    for (std::size_t t = 0; t < T; ++t) {
        if (t == 0) {
            b.add_ub_row({{0, 1.0}}, gen.ramp_up + gen.initial_output);
            b.add_ub_row({{0, -1.0}}, gen.ramp_down - gen.initial_output);
        } else {
            b.add_ub_row({{t, 1.0}, {t - 1, -1.0}}, gen.ramp_up);
            b.add_ub_row({{t - 1, 1.0}, {t, -1.0}}, gen.ramp_down);
        }
    }
    const LpSolution sol = solve_lp(b.build());
    if (!sol.optimal()) throw std::logic_error("generator self-schedule LP is " + to_string(sol.status));

    SelfSchedule s;
    s.generation = sol.x;
    s.profit = -sol.objective_value;
    s.zeta_lower = sol.z_lower;
    s.zeta_upper = sol.z_upper;
    s.degenerate = sol.degenerate();
    return s;
}

SelfSchedule self_schedule(const PriceSeries& prices, const Market& market, ParticipantRef who, const BidParameter& bids) {
    SelfSchedule s;
    if (who.kind == ParticipantKind::Generator) {
        s = self_schedule_generator(matrix_row(prices.generator, who.index), market.generators.at(who.index),
                                    bids.generator.at(who.index));
    } else {
        s = self_schedule_esr(matrix_row(prices.discharge, who.index), matrix_row(prices.charge, who.index),
                              market.esrs.at(who.index), bids.discharge.at(who.index), bids.charge.at(who.index));
    }
    s.who = who;
    return s;
}

double dispatched_bid_profit(const PriceSeries& prices, const RollingDispatch& rolling, const Market& /*market*/,
                             ParticipantRef who, const BidParameter& bids) {
    const auto r = static_cast<Eigen::Index>(who.index);
    double profit = 0.0;
    for (std::size_t t = 0; t < rolling.horizon(); ++t) {
        const auto tt = static_cast<Eigen::Index>(t);
        if (who.kind == ParticipantKind::Generator) {
            profit += (prices.generator(r, tt) - bids.generator[who.index][t]) * rolling.generation(r, tt);
        } else {
            profit += (prices.discharge(r, tt) - bids.discharge[who.index][t]) * rolling.discharge(r, tt);
            profit += (bids.charge[who.index][t] - prices.charge(r, tt)) * rolling.charge(r, tt);
        }
    }
    return profit;
}

double compute_loc(const PriceSeries& prices, const RollingDispatch& rolling, const Market& market, ParticipantRef who,
                   const BidParameter& bids) {
    return self_schedule(prices, market, who, bids).profit - dispatched_bid_profit(prices, rolling, market, who, bids);
}

SettlementRecord settle(const PriceSeries& prices, const RollingDispatch& rolling, const Market& market,
                        const BidParameter& bids) {
    SettlementRecord rec;
    rec.scheme = prices.scheme;
    const std::size_t T = rolling.horizon();
    for (std::size_t t = 0; t < T; ++t) rec.consumer_energy_payment += prices.demand[static_cast<Eigen::Index>(t)] * rolling.demand[t];

    for (const ParticipantRef who : participants(market)) {
        ParticipantSettlement ps;
        ps.who = who;
        ps.name = participant_name(market, who);
        const auto r = static_cast<Eigen::Index>(who.index);
        for (std::size_t t = 0; t < T; ++t) {
            const auto tt = static_cast<Eigen::Index>(t);
            if (who.kind == ParticipantKind::Generator) {
                const double g = rolling.generation(r, tt);
                ps.energy_revenue += prices.generator(r, tt) * g;
                ps.true_cost += market.generators[who.index].marginal_cost * g;
            } else {
                const auto& e = market.esrs[who.index];
                const double gd = rolling.discharge(r, tt), gc = rolling.charge(r, tt);
                ps.energy_revenue += prices.discharge(r, tt) * gd - prices.charge(r, tt) * gc;
                ps.true_cost += e.discharge_cost * gd - e.charge_cost * gc;
            }
        }
        ps.surplus = ps.energy_revenue - ps.true_cost;
        ps.self_schedule_profit = self_schedule(prices, market, who, bids).profit;
        ps.dispatched_profit = dispatched_bid_profit(prices, rolling, market, who, bids);
        ps.loc = ps.self_schedule_profit - ps.dispatched_profit;

        rec.total_revenue += ps.energy_revenue;
        rec.total_loc += ps.loc;
        (who.kind == ParticipantKind::Esr ? rec.esr_loc : rec.generator_loc) += ps.loc;
        rec.participants.push_back(std::move(ps));
    }
    rec.merchandising_surplus = rec.consumer_energy_payment - rec.total_revenue - rec.total_loc;
    rec.consumer_payment = rec.consumer_energy_payment - rec.merchandising_surplus;
    return rec;
}

}  // namespace tlmp
