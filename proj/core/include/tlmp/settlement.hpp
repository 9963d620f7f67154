#pragma once

#include "tlmp/dispatch.hpp"
#include "tlmp/market.hpp"
#include "tlmp/pricing.hpp"

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

namespace tlmp {

/// A participant's profit-maximizing plan at fixed prices and its own bids.
/// Unused plan vectors are empty (a generator has no SOC, an ESR no g^G).
struct SelfSchedule {
    ParticipantRef who{ParticipantKind::Generator, 0};
    Eigen::VectorXd generation;
    Eigen::VectorXd discharge;
    Eigen::VectorXd charge;
    Eigen::VectorXd soc;
    double profit = 0.0;  // Q(pi)
    Eigen::VectorXd psi;  // SOC dynamics duals
    Eigen::VectorXd omega_lower, omega_upper;  // SOC bounds
    Eigen::VectorXd zeta_lower, zeta_upper;    // power bounds; ESRs stack discharge then charge
    bool degenerate = false;
};

/// max sum (pi^D - theta^D) p^D + (theta^C - pi^C) p^C subject to the SOC
/// recursion from soc_initial, SOC limits and power caps. No terminal condition.
SelfSchedule self_schedule_esr(std::span<const double> price_discharge, std::span<const double> price_charge,
                               const EsrSpec& esr, std::span<const double> bid_discharge,
                               std::span<const double> bid_charge);

/// max sum (pi - theta) p subject to [capacity_min, capacity_max] and ramp
/// limits anchored at initial_output.
SelfSchedule self_schedule_generator(std::span<const double> price, const GeneratorSpec& gen,
                                     std::span<const double> bid);

/// Self-schedule of one participant against its prices in `prices`.
SelfSchedule self_schedule(const PriceSeries& prices, const Market& market, ParticipantRef who, const BidParameter& bids);

/// Profit of following the dispatch, at bid-in costs.
double dispatched_bid_profit(const PriceSeries& prices, const RollingDispatch& rolling, const Market& market,
                             ParticipantRef who, const BidParameter& bids);

/// LOC = Q(pi) - dispatched profit at bid-in costs.
double compute_loc(const PriceSeries& prices, const RollingDispatch& rolling, const Market& market, ParticipantRef who,
                   const BidParameter& bids);

struct ParticipantSettlement {
    ParticipantRef who{ParticipantKind::Generator, 0};
    std::string name;
    double energy_revenue = 0.0;     // sum pi g, net of charging payments
    double true_cost = 0.0;          // true generation cost, net of charging value
    double surplus = 0.0;            // energy_revenue - true_cost
    double loc = 0.0;                // uplift, bid-in costs
    double self_schedule_profit = 0.0;
    double dispatched_profit = 0.0;  // at bid-in costs
};

struct SettlementRecord {
    Scheme scheme = Scheme::RLmp;
    std::vector<ParticipantSettlement> participants;
    double consumer_energy_payment = 0.0;  // sum pi_t d_t
    double total_revenue = 0.0;            // paid to participants for energy
    double total_loc = 0.0;
    double merchandising_surplus = 0.0;    // payment - revenue - LOC
    double consumer_payment = 0.0;         // after lump-sum rebate of the surplus
    double esr_loc = 0.0;
    double generator_loc = 0.0;
};

/// Surpluses use the true costs in `market`; LOC uses `bids`.
SettlementRecord settle(const PriceSeries& prices, const RollingDispatch& rolling, const Market& market,
                        const BidParameter& bids);

/// Row `index` of a participant-by-interval matrix as a std::vector.
std::vector<double> matrix_row(const Eigen::MatrixXd& m, std::size_t index);

}  // namespace tlmp
