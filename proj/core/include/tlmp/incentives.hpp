#pragma once

#include "tlmp/dispatch.hpp"
#include "tlmp/forecast.hpp"
#include "tlmp/market.hpp"
#include "tlmp/pricing.hpp"
#include "tlmp/settlement.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tlmp {

/// A one-sided shift of one participant's bid curve at every interval.
struct Direction {
    BidSide side = BidSide::Discharge;
    int sign = +1;

    friend bool operator==(const Direction&, const Direction&) = default;
};

std::string to_string(Direction d);  // e.g. "discharge+", "charge-"

/// The four ESR deviations swept in the experiments.
std::vector<Direction> esr_directions();

struct ProfitBreakdown {
    double surplus = 0.0;  // at the truthful run's prices and true costs
    double loc = 0.0;
    double profit() const { return surplus + loc; }
};

/// Profit of `who` when the market was dispatched with bids `theta`.
///
/// The surplus is always valued at `truthful_prices`, the prices of the
/// truthful run, because the participant is a price taker. The LOC term is the
/// uplift the scheme's settlement would pay for the perturbed dispatch: under
/// R-LMP it is computed at the fixed truthful prices; under R-TLMP the
/// participant-specific prices are part of the settlement rule and are read
/// from the perturbed run itself.
ProfitBreakdown profit_under_bid(const Market& market, ParticipantRef who, const BidParameter& theta,
                                 const RollingDispatch& dispatched, const PriceSeries& truthful_prices);

struct PerturbationSample {
    std::size_t scenario = 0;
    double delta_profit = 0.0;
    bool dispatch_changed = false;
    bool degenerate = false;  // the truthful run had a degenerate binding window
};

struct PerturbationResult {
    Scheme scheme = Scheme::RLmp;
    ParticipantRef who{ParticipantKind::Esr, 0};
    Direction direction;
    double epsilon = 0.0;
    std::vector<PerturbationSample> samples;

    std::size_t count() const { return samples.size(); }
    double mean() const;
    double stddev() const;
    double max() const;
    std::size_t dispatch_changes() const;
    std::size_t degenerate_count() const;
};

/// Every (scheme, direction) pair for one participant over matched-seed
/// scenarios. Each scenario runs the truthful dispatch once and each
/// perturbed dispatch once; the perturbed dispatch is evaluated under every scheme.
std::vector<PerturbationResult> perturbation_sweep(const Market& market, ParticipantRef who, double epsilon,
                                                   std::span<const Direction> directions,
                                                   std::span<const DemandScenario> scenarios,
                                                   std::span<const Scheme> schemes, std::size_t jobs = 1);

/// Clauses of the uniform-pricing impossibility condition for one scenario.
struct ConditionReport {
    bool fired = false;
    std::size_t esr_i = 0, esr_j = 0;
    std::size_t t_star = 0;  // 0-based
    bool distinct_costs = false;
    bool both_marginal = false;
    bool soc_interior = false;
    bool degenerate = false;
};

/// Relative interior margin for "marginal" dispatch.
inline constexpr double kMarginalTol = 1e-6;

/// Looks for ESRs i != j and t* such that (1) their marginal bids at t* differ,
/// (2) each has discharge or charge strictly inside (0, cap) at t*, and (3) both
/// SOC trajectories stay strictly inside their limits from t* to the end.
/// When nothing fires the clause flags describe the candidate meeting the most clauses.
ConditionReport check_uniform_pricing_condition(const RollingDispatch& rolling, const Market& market, const BidParameter& bids);

enum class PriceScope { Esrs, AllParticipants };

struct UniformPriceVerdict {
    bool exists_zero_loc_price = false;
    /// Uniform price under which every in-scope dispatched plan is a self-schedule optimum.
    std::optional<Eigen::VectorXd> witness;
    /// Smallest total KKT residual over all uniform prices; positive values
    /// certify that no uniform price works.
    double residual = 0.0;
};

/// Feasibility LP over a uniform price vector and the self-schedule duals: the
/// dispatched plan of every participant in scope must satisfy its self-schedule
/// KKT system, with bound and ramp duals allowed only where the plan is active.
UniformPriceVerdict uniform_price_impossibility(const RollingDispatch& rolling, const Market& market,
                                                const BidParameter& bids, PriceScope scope = PriceScope::AllParticipants,
                                                double tol = 1e-7);

}  // namespace tlmp
