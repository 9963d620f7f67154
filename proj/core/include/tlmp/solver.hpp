#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tlmp {

/// Bound sentinel. Any magnitude >= kInfinityThreshold is treated as infinite.
inline constexpr double kInfinity = 1e20;
inline constexpr double kInfinityThreshold = 1e18;

inline bool is_infinite(double v) { return v >= kInfinityThreshold || v <= -kInfinityThreshold; }

/// Caller bug: dimensions disagree, NaN entries, or crossed bounds.
class MalformedProblem : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Vertex enumeration was asked for more variables than it supports.
class TooLarge : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Linear program in canonical form
///
///     minimize    c'x
///     subject to  A_eq x  = b_eq
///                 A_ub x <= b_ub
///                 lower <= x <= upper
///
/// Bounds may be +-kInfinity.
struct LpProblem {
    Eigen::VectorXd objective;
    Eigen::MatrixXd eq_matrix;
    Eigen::VectorXd eq_rhs;
    Eigen::MatrixXd ub_matrix;
    Eigen::VectorXd ub_rhs;
    Eigen::VectorXd lower_bounds;
    Eigen::VectorXd upper_bounds;

    std::size_t num_vars() const { return static_cast<std::size_t>(objective.size()); }
    std::size_t num_eq() const { return static_cast<std::size_t>(eq_rhs.size()); }
    std::size_t num_ub() const { return static_cast<std::size_t>(ub_rhs.size()); }

    /// Throws MalformedProblem when an invariant is broken.
    void validate() const;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

std::string to_string(LpStatus status);

/// Primal/dual answer. Dual sign convention (stationarity):
///
///     c = A_eq' y_eq - A_ub' y_ub + z_lower - z_upper
///
/// with y_ub, z_lower, z_upper >= 0. So y_eq is d(objective)/d(b_eq) and
/// -y_ub is d(objective)/d(b_ub).
struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    Eigen::VectorXd x;
    double objective_value = 0.0;
    Eigen::VectorXd y_eq;
    Eigen::VectorXd y_ub;
    Eigen::VectorXd z_lower;
    Eigen::VectorXd z_upper;
    /// Some basic variable sits on a bound, so the duals may not be unique.
    bool primal_degenerate = false;
    /// Some nonbasic variable has a zero reduced cost, so the primal may not be unique.
    bool dual_degenerate = false;
    std::size_t iterations = 0;

    bool optimal() const { return status == LpStatus::Optimal; }
    bool degenerate() const { return primal_degenerate || dual_degenerate; }
};

struct SolverOptions {
    double feasibility_tol = 1e-9;
    double optimality_tol = 1e-9;
    double pivot_tol = 1e-10;
    std::size_t max_iterations = 100000;
};

/// Dense bounded-variable two-phase primal simplex with Bland's rule.
/// Pure and deterministic: identical input gives bit-identical output.
LpSolution solve_lp(const LpProblem& problem, const SolverOptions& options = {});

enum class KktCondition { PrimalFeasibility, DualFeasibility, Stationarity, ComplementarySlackness };

std::string to_string(KktCondition condition);

struct KktViolation {
    KktCondition condition;
    std::string where;  // e.g. "eq[0]", "ub[3]", "x[1].lower"
    double magnitude;
};

using KktReport = std::vector<KktViolation>;

/// Lists every KKT condition that fails by more than `tol` (scaled by the
/// magnitude of the terms involved, floor 1).
KktReport check_kkt(const LpProblem& problem, const LpSolution& solution, double tol);

/// Interval of values an equality dual takes over the optimal dual face.
struct DualRange {
    double lo = 0.0;
    double hi = 0.0;
    double width() const { return hi - lo; }
};

/// For each eq row in `rows`, the smallest and largest y_eq[row] over all dual
/// solutions that satisfy stationarity, sign and complementary slackness with
/// `solution.x` (a constraint counts as active within `active_tol`, relative).
/// A nonzero width means the optimal duals are not unique.
std::vector<DualRange> eq_dual_ranges(const LpProblem& problem, const LpSolution& solution,
                                      const std::vector<std::size_t>& rows, double active_tol = 1e-7);

struct Vertex {
    Eigen::VectorXd x;
    double objective;
};

struct VertexEnumeration {
    std::vector<Vertex> vertices;
    /// An extreme ray of the feasible region improves the objective.
    bool unbounded = false;

    /// Vertex with the lowest objective; nullptr when there are none.
    const Vertex* best() const;
};

inline constexpr std::size_t kMaxEnumerationVars = 6;

/// Brute force over every choice of active constraints. Test oracle for
/// solve_lp; throws TooLarge above kMaxEnumerationVars variables.
VertexEnumeration enumerate_vertices(const LpProblem& problem, double tol = 1e-9);

/// Row-by-row construction of an LpProblem.
class LpBuilder {
public:
    using Terms = std::vector<std::pair<std::size_t, double>>;

    std::size_t add_variable(double lower, double upper, double cost);
    std::size_t add_eq_row(const Terms& terms, double rhs);
    std::size_t add_ub_row(const Terms& terms, double rhs);

    std::size_t num_vars() const { return costs_.size(); }
    void set_cost(std::size_t var, double cost) { costs_.at(var) = cost; }

    LpProblem build() const;

private:
    struct Row {
        Terms terms;
        double rhs;
    };
    std::vector<double> lower_;
    std::vector<double> upper_;
    std::vector<double> costs_;
    std::vector<Row> eq_rows_;
    std::vector<Row> ub_rows_;
};

}  // namespace tlmp
