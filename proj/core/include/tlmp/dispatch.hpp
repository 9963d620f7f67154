#pragma once

#include "tlmp/forecast.hpp"
#include "tlmp/market.hpp"
#include "tlmp/solver.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace tlmp {

/// Demand cannot be served within capacity, ramp and SOC limits.
class InfeasibleWindow : public std::runtime_error {
public:
    InfeasibleWindow(std::size_t interval, const std::string& what)
        : std::runtime_error(what), interval_(interval) {}
    /// 0-based start of the failing window.
    std::size_t interval() const { return interval_; }

private:
    std::size_t interval_;
};

/// Simultaneous charge and discharge at the optimum; the bids break the relaxation.
class ComplementarityViolated : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Output and SOC at the end of the interval preceding a window.
struct PriorState {
    std::vector<double> generation;  // MW per generator
    std::vector<double> soc;         // MWh per ESR
};

PriorState initial_state(const Market& market);

/// Column and row indices of a window LP. Variables are participant-major
/// within each block: all g^G, then g^D, g^C, then E.
struct WindowLayout {
    std::size_t start = 0;   // first interval covered (0-based)
    std::size_t length = 0;  // L = min(W, T - start)
    std::size_t num_gen = 0;
    std::size_t num_esr = 0;

    std::size_t gen(std::size_t n, std::size_t k) const { return n * length + k; }
    std::size_t discharge(std::size_t i, std::size_t k) const { return (num_gen + i) * length + k; }
    std::size_t charge(std::size_t i, std::size_t k) const { return (num_gen + num_esr + i) * length + k; }
    std::size_t soc(std::size_t i, std::size_t k) const { return (num_gen + 2 * num_esr + i) * length + k; }
    std::size_t num_vars() const { return (num_gen + 3 * num_esr) * length; }

    // Equality rows: balance per interval, then SOC dynamics per ESR and interval.
    std::size_t balance_row(std::size_t k) const { return k; }
    std::size_t soc_row(std::size_t i, std::size_t k) const { return length + i * length + k; }

    // Inequality rows: ramp up and down of the transition (k-1) -> k; k = 0 is
    // the boundary transition from the previous binding interval.
    std::size_t ramp_up_row(std::size_t n, std::size_t k) const { return 2 * (n * length + k); }
    std::size_t ramp_down_row(std::size_t n, std::size_t k) const { return 2 * (n * length + k) + 1; }
};

struct WindowProblem {
    LpProblem lp;
    WindowLayout layout;
};

/// Look-ahead dispatch over intervals start .. start+L-1 where L = forecasts.size().
/// Objective is sum of generator and discharge bid costs minus charge bid values.
WindowProblem build_window(const Market& market, const BidParameter& bids, std::size_t start, const PriorState& prior,
                           std::span<const double> forecasts);

/// Primal and dual answer of one window, relabeled. Matrices are [participant x k].
struct WindowSolution {
    std::size_t start = 0;
    std::size_t length = 0;
    Eigen::MatrixXd generation;
    Eigen::MatrixXd discharge;
    Eigen::MatrixXd charge;
    Eigen::MatrixXd soc;
    Eigen::VectorXd demand;     // forecasts the window was solved against
    Eigen::VectorXd lambda;     // energy balance, $/MWh
    Eigen::MatrixXd phi;        // SOC dynamics, $/MWh
    Eigen::MatrixXd mu_up;      // ramp up of transition (k-1)->k
    Eigen::MatrixXd mu_down;    // ramp down of transition (k-1)->k
    Eigen::MatrixXd delta_lower;  // SOC bounds
    Eigen::MatrixXd delta_upper;
    Eigen::MatrixXd rho_gen_lower, rho_gen_upper;
    Eigen::MatrixXd rho_dis_lower, rho_dis_upper;
    Eigen::MatrixXd rho_chg_lower, rho_chg_upper;
    double objective = 0.0;
    bool degenerate = false;        // the simplex basis was primal or dual degenerate
    bool multiple_optima = false;   // a zero reduced cost: the dispatch may not be unique
    /// lambda at the first interval is not unique over the optimal dual face, so
    /// the binding R-LMP depends on which dual the solver returned. (An idle ESR's
    /// phi is almost never unique, so it is not part of this flag.)
    bool dual_degenerate = false;
    DualRange lambda_range;
};

/// Tolerance on g^D * g^C before ComplementarityViolated is raised.
inline constexpr double kComplementarityTol = 1e-6;

/// Relative width above which a binding dual counts as non-unique.
inline constexpr double kDualUniquenessTol = 1e-6;

WindowSolution solve_window(const WindowProblem& problem, const SolverOptions& options = {});

struct RollingDispatch {
    Eigen::MatrixXd generation;  // [n x T] binding output
    Eigen::MatrixXd discharge;   // [i x T]
    Eigen::MatrixXd charge;      // [i x T]
    Eigen::MatrixXd soc;         // [i x T] SOC at the end of each interval
    std::vector<double> demand;  // realized d_t
    PriorState initial;
    std::vector<WindowSolution> windows;

    std::size_t horizon() const { return demand.size(); }
    bool degenerate() const;
    bool dual_degenerate() const;
};

/// Solves T windows in sequence, binding the first interval of each. Throws
/// InfeasibleWindow naming the failing interval.
RollingDispatch roll_horizon(const Market& market, const BidParameter& bids, std::span<const double> demand,
                             const Forecaster& forecaster, const SolverOptions& options = {});

/// Single T-interval dispatch with perfect foresight, as one window.
WindowSolution static_dispatch(const Market& market, const BidParameter& bids, std::span<const double> demand,
                               const SolverOptions& options = {});

/// Bid-in cost of the binding dispatch over the horizon.
double dispatch_cost(const Market& market, const BidParameter& bids, const RollingDispatch& rolling);

}  // namespace tlmp
