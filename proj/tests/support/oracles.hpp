#pragma once

#include "tlmp/market.hpp"
#include "tlmp/solver.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <random>
#include <span>
#include <vector>

namespace tlmp::oracle {

std::filesystem::path config_dir();

/// Random feasible LP with finite bounds and at most `max_vars` variables.
/// Rows are built around an interior point, so the problem is feasible and
/// bounded; some rows are made tight at that point on purpose.
LpProblem random_bounded_lp(std::mt19937_64& rng, std::size_t max_vars = kMaxEnumerationVars);

/// b_eq'y_eq - b_ub'y_ub + l'z_l - u'z_u for the solver's sign convention.
double dual_objective(const LpProblem& p, const LpSolution& s);

/// Small random market that is always feasible: one uncapped-ramp peaker
/// keeps every window solvable.
Market random_market(std::mt19937_64& rng, std::size_t horizon);

/// Best self-schedule profit of an ESR by enumerating the vertices of its
/// plan polytope. SOC is eliminated, so T <= 3.
double esr_profit_oracle(std::span<const double> price_d, std::span<const double> price_c, const EsrSpec& esr,
                         std::span<const double> bid_d, std::span<const double> bid_c);

/// Vertices of a generator's feasible plan set (bounds + ramps from its
/// initial output), by enumeration. T <= 6.
std::vector<Eigen::VectorXd> generator_plan_vertices(const GeneratorSpec& gen, std::size_t horizon);

/// max over plan vertices of sum (price - bid) g.
double generator_profit_oracle(std::span<const Eigen::VectorXd> vertices, std::span<const double> price,
                               std::span<const double> bid);

}  // namespace tlmp::oracle
