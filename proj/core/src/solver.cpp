#include "tlmp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace tlmp {

namespace {

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class VarState : std::uint8_t { Basic, AtLower, AtUpper, FreeZero };

enum class PhaseResult { Optimal, Unbounded, IterationLimit };

constexpr double kInf = std::numeric_limits<double>::infinity();

double finite_or_inf(double v) {
    if (v >= kInfinityThreshold) return kInf;
    if (v <= -kInfinityThreshold) return -kInf;
    return v;
}

// Column layout: [structural | one slack per ub row | one artificial per row].
class Simplex {
public:
    Simplex(const LpProblem& p, const SolverOptions& opt)
        : opt_(opt),
          n_(p.num_vars()),
          m_eq_(p.num_eq()),
          m_ub_(p.num_ub()),
          m_(m_eq_ + m_ub_),
          cols_(n_ + m_ub_ + m_),
          A_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(cols_))),
          b_(m_),
          lo_(cols_),
          up_(cols_),
          cost_(cols_, 0.0),
          state_(cols_, VarState::AtLower),
          value_(cols_, 0.0),
          basis_(m_),
          true_cost_(cols_, 0.0) {
        const auto n = static_cast<Eigen::Index>(n_);
        const auto m_eq = static_cast<Eigen::Index>(m_eq_);
        if (m_eq_ > 0) {
            A_.block(0, 0, m_eq, n) = p.eq_matrix;
            b_.head(m_eq) = p.eq_rhs;
        }
        if (m_ub_ > 0) {
            A_.block(m_eq, 0, static_cast<Eigen::Index>(m_ub_), n) = p.ub_matrix;
            b_.segment(m_eq, static_cast<Eigen::Index>(m_ub_)) = p.ub_rhs;
        }
        for (std::size_t k = 0; k < m_ub_; ++k) {
            A_(static_cast<Eigen::Index>(m_eq_ + k), static_cast<Eigen::Index>(n_ + k)) = 1.0;
        }

        double cmax = 1.0;
        for (std::size_t j = 0; j < n_; ++j) {
            lo_[j] = finite_or_inf(p.lower_bounds[static_cast<Eigen::Index>(j)]);
            up_[j] = finite_or_inf(p.upper_bounds[static_cast<Eigen::Index>(j)]);
            true_cost_[j] = p.objective[static_cast<Eigen::Index>(j)];
            cmax = std::max(cmax, std::abs(true_cost_[j]));
        }
        cost_scale_ = cmax;
        for (std::size_t k = 0; k < m_ub_; ++k) {
            lo_[n_ + k] = 0.0;
            up_[n_ + k] = kInf;
        }
        double bmax = 1.0;
        for (Eigen::Index i = 0; i < b_.size(); ++i) bmax = std::max(bmax, std::abs(b_[i]));
        rhs_scale_ = bmax;
    }

    LpSolution run() {
        LpSolution sol;
        initialize_basis();

        // Phase 1: drive artificials to zero.
        set_phase_one_costs();
        auto phase = iterate();
        double infeasibility = 0.0;
        for (std::size_t i = 0; i < m_; ++i) infeasibility += value_[artificial(i)];
        if (phase == PhaseResult::IterationLimit ||
            infeasibility > 100.0 * opt_.feasibility_tol * rhs_scale_ * static_cast<double>(std::max<std::size_t>(m_, 1))) {
            sol.status = LpStatus::Infeasible;
            fill_primal(sol);
            return sol;
        }
        retire_artificials();

        // Phase 2: true objective.
        set_phase_two_costs();
        phase = iterate();
        if (phase == PhaseResult::Unbounded) {
            sol.status = LpStatus::Unbounded;
            fill_primal(sol);
            return sol;
        }
        if (phase == PhaseResult::IterationLimit) {
            sol.status = LpStatus::Infeasible;
            fill_primal(sol);
            return sol;
        }
        sol.status = LpStatus::Optimal;
        refine_and_extract(sol);
        return sol;
    }

private:
    std::size_t artificial(std::size_t row) const { return n_ + m_ub_ + row; }

    bool is_fixed(std::size_t j) const { return lo_[j] == up_[j]; }

    void initialize_basis() {
        for (std::size_t j = 0; j < n_; ++j) {
            if (std::isfinite(lo_[j])) {
                state_[j] = VarState::AtLower;
                value_[j] = lo_[j];
            } else if (std::isfinite(up_[j])) {
                state_[j] = VarState::AtUpper;
                value_[j] = up_[j];
            } else {
                state_[j] = VarState::FreeZero;
                value_[j] = 0.0;
            }
        }
        Eigen::VectorXd residual = b_;
        for (std::size_t j = 0; j < n_; ++j) {
            if (value_[j] != 0.0) residual -= A_.col(static_cast<Eigen::Index>(j)) * value_[j];
        }

        tab_ = RowMajorMatrix::Zero(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(cols_));
        for (std::size_t i = 0; i < m_; ++i) {
            const auto row = static_cast<Eigen::Index>(i);
            const double r = residual[row];
            const std::size_t art = artificial(i);
            const bool is_ub_row = i >= m_eq_;
            if (is_ub_row && r >= 0.0) {
                // Slack starts basic; artificial fixed at zero.
                const std::size_t slack = n_ + (i - m_eq_);
                basis_[i] = slack;
                state_[slack] = VarState::Basic;
                value_[slack] = r;
                A_(row, static_cast<Eigen::Index>(art)) = 1.0;
                lo_[art] = 0.0;
                up_[art] = 0.0;
                state_[art] = VarState::AtLower;
                value_[art] = 0.0;
                tab_.row(row) = A_.row(row);
            } else {
                if (is_ub_row) {
                    const std::size_t slack = n_ + (i - m_eq_);
                    state_[slack] = VarState::AtLower;
                    value_[slack] = 0.0;
                }
                const double sign = r >= 0.0 ? 1.0 : -1.0;
                A_(row, static_cast<Eigen::Index>(art)) = sign;
                lo_[art] = 0.0;
                up_[art] = kInf;
                basis_[i] = art;
                state_[art] = VarState::Basic;
                value_[art] = std::abs(r);
                tab_.row(row) = sign * A_.row(row);
            }
        }
    }

    void set_phase_one_costs() {
        std::fill(cost_.begin(), cost_.end(), 0.0);
        for (std::size_t i = 0; i < m_; ++i) {
            const std::size_t art = artificial(i);
            if (!is_fixed(art)) cost_[art] = 1.0;
        }
        phase_cost_scale_ = 1.0;
        recompute_reduced_costs();
    }

    void set_phase_two_costs() {
        std::fill(cost_.begin(), cost_.end(), 0.0);
        for (std::size_t j = 0; j < n_; ++j) cost_[j] = true_cost_[j];
        phase_cost_scale_ = cost_scale_;
        recompute_reduced_costs();
    }

    void recompute_reduced_costs() {
        d_ = Eigen::VectorXd::Map(cost_.data(), static_cast<Eigen::Index>(cols_));
        for (std::size_t i = 0; i < m_; ++i) {
            const double cb = cost_[basis_[i]];
            if (cb != 0.0) d_ -= cb * tab_.row(static_cast<Eigen::Index>(i)).transpose();
        }
    }

    // Bland's rule: lowest-index improving column enters, lowest-index
    // basic variable leaves among ratio ties.
    PhaseResult iterate() {
        const double dtol = opt_.optimality_tol * phase_cost_scale_;
        for (;;) {
            if (iterations_ >= opt_.max_iterations) return PhaseResult::IterationLimit;

            std::size_t entering = cols_;
            double dir = 0.0;
            for (std::size_t j = 0; j < cols_; ++j) {
                const VarState s = state_[j];
                if (s == VarState::Basic || is_fixed(j)) continue;
                const double dj = d_[static_cast<Eigen::Index>(j)];
                if (s == VarState::AtLower && dj < -dtol) {
                    dir = 1.0;
                } else if (s == VarState::AtUpper && dj > dtol) {
                    dir = -1.0;
                } else if (s == VarState::FreeZero && std::abs(dj) > dtol) {
                    dir = dj < 0.0 ? 1.0 : -1.0;
                } else {
                    continue;
                }
                entering = j;
                break;
            }
            if (entering == cols_) return PhaseResult::Optimal;

            const auto ecol = static_cast<Eigen::Index>(entering);
            double best = kInf;
            if (std::isfinite(lo_[entering]) && std::isfinite(up_[entering])) best = up_[entering] - lo_[entering];
            std::ptrdiff_t leave = -1;
            bool leave_to_lower = true;
            for (std::size_t i = 0; i < m_; ++i) {
                const double alpha = tab_(static_cast<Eigen::Index>(i), ecol);
                if (std::abs(alpha) <= opt_.pivot_tol) continue;
                const double rate = -dir * alpha;
                const std::size_t bi = basis_[i];
                double limit;
                bool to_lower;
                if (rate < 0.0) {
                    if (!std::isfinite(lo_[bi])) continue;
                    limit = (value_[bi] - lo_[bi]) / (-rate);
                    to_lower = true;
                } else {
                    if (!std::isfinite(up_[bi])) continue;
                    limit = (up_[bi] - value_[bi]) / rate;
                    to_lower = false;
                }
                limit = std::max(limit, 0.0);
                const double tie = 1e-12 * (1.0 + std::abs(limit));
                if (limit < best - tie) {
                    best = limit;
                    leave = static_cast<std::ptrdiff_t>(i);
                    leave_to_lower = to_lower;
                } else if (leave >= 0 && std::abs(limit - best) <= tie && bi < basis_[static_cast<std::size_t>(leave)]) {
                    leave = static_cast<std::ptrdiff_t>(i);
                    leave_to_lower = to_lower;
                }
            }
            if (!std::isfinite(best)) return PhaseResult::Unbounded;

            ++iterations_;
            const double step = best;
            if (step != 0.0) {
                for (std::size_t i = 0; i < m_; ++i) {
                    const double alpha = tab_(static_cast<Eigen::Index>(i), ecol);
                    if (alpha != 0.0) value_[basis_[i]] -= dir * alpha * step;
                }
                value_[entering] += dir * step;
            }

            if (leave < 0) {
                // Bound flip, basis unchanged.
                if (dir > 0.0) {
                    state_[entering] = VarState::AtUpper;
                    value_[entering] = up_[entering];
                } else {
                    state_[entering] = VarState::AtLower;
                    value_[entering] = lo_[entering];
                }
                continue;
            }

            const auto r = static_cast<std::size_t>(leave);
            const std::size_t leaving = basis_[r];
            value_[leaving] = leave_to_lower ? lo_[leaving] : up_[leaving];
            state_[leaving] = leave_to_lower ? VarState::AtLower : VarState::AtUpper;
            pivot(r, entering);
        }
    }

    void pivot(std::size_t r, std::size_t entering) {
        const auto row = static_cast<Eigen::Index>(r);
        const auto ecol = static_cast<Eigen::Index>(entering);
        const double piv = tab_(row, ecol);
        tab_.row(row) /= piv;
        tab_(row, ecol) = 1.0;
        for (Eigen::Index i = 0; i < tab_.rows(); ++i) {
            if (i == row) continue;
            const double f = tab_(i, ecol);
            if (f != 0.0) {
                tab_.row(i) -= f * tab_.row(row);
                tab_(i, ecol) = 0.0;
            }
        }
        const double dj = d_[ecol];
        if (dj != 0.0) {
            d_ -= dj * tab_.row(row).transpose();
            d_[ecol] = 0.0;
        }
        basis_[r] = entering;
        state_[entering] = VarState::Basic;
    }

    // Fix every artificial at zero and pivot basic ones out where possible.
    void retire_artificials() {
        for (std::size_t i = 0; i < m_; ++i) {
            const std::size_t art = artificial(i);
            lo_[art] = 0.0;
            up_[art] = 0.0;
            if (state_[art] != VarState::Basic) {
                state_[art] = VarState::AtLower;
                value_[art] = 0.0;
            }
        }
        for (std::size_t r = 0; r < m_; ++r) {
            const std::size_t art = basis_[r];
            if (art < n_ + m_ub_) continue;
            std::size_t best_col = cols_;
            double best_mag = 1e-7;
            for (std::size_t j = 0; j < n_ + m_ub_; ++j) {
                if (state_[j] == VarState::Basic || is_fixed(j)) continue;
                const double mag = std::abs(tab_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)));
                if (mag > best_mag) {
                    best_mag = mag;
                    best_col = j;
                }
            }
            if (best_col == cols_) continue;  // redundant row
            value_[art] = 0.0;
            state_[art] = VarState::AtLower;
            pivot(r, best_col);
        }
    }

    void fill_primal(LpSolution& sol) const {
        sol.x.resize(static_cast<Eigen::Index>(n_));
        for (std::size_t j = 0; j < n_; ++j) sol.x[static_cast<Eigen::Index>(j)] = value_[j];
        sol.objective_value = 0.0;
        for (std::size_t j = 0; j < n_; ++j) sol.objective_value += true_cost_[j] * value_[j];
        sol.y_eq = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m_eq_));
        sol.y_ub = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m_ub_));
        sol.z_lower = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_));
        sol.z_upper = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_));
        sol.iterations = iterations_;
    }

    // Recompute x_B and y from a fresh factorization of the final basis so
    // that the reported solution does not carry tableau round-off.
    void refine_and_extract(LpSolution& sol) {
        const auto m = static_cast<Eigen::Index>(m_);
        if (m_ > 0) {
            Eigen::MatrixXd B(m, m);
            Eigen::VectorXd cb(m);
            for (std::size_t i = 0; i < m_; ++i) {
                B.col(static_cast<Eigen::Index>(i)) = A_.col(static_cast<Eigen::Index>(basis_[i]));
                cb[static_cast<Eigen::Index>(i)] = cost_[basis_[i]];
            }
            Eigen::VectorXd rhs = b_;
            for (std::size_t j = 0; j < cols_; ++j) {
                if (state_[j] != VarState::Basic && value_[j] != 0.0) {
                    rhs -= A_.col(static_cast<Eigen::Index>(j)) * value_[j];
                }
            }
            Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
            Eigen::VectorXd xb = lu.solve(rhs);
            Eigen::VectorXd y = lu.transpose().solve(cb);
            if (xb.allFinite() && y.allFinite()) {
                for (std::size_t i = 0; i < m_; ++i) value_[basis_[i]] = xb[static_cast<Eigen::Index>(i)];
                y_ = y;
            } else {
                y_ = Eigen::VectorXd::Zero(m);
            }
        } else {
            y_ = Eigen::VectorXd::Zero(0);
        }

        fill_primal(sol);
        for (std::size_t i = 0; i < m_eq_; ++i) sol.y_eq[static_cast<Eigen::Index>(i)] = y_[static_cast<Eigen::Index>(i)];
        for (std::size_t k = 0; k < m_ub_; ++k) {
            const double yk = -y_[static_cast<Eigen::Index>(m_eq_ + k)];
            sol.y_ub[static_cast<Eigen::Index>(k)] = std::max(yk, 0.0);
        }
        for (std::size_t j = 0; j < n_; ++j) {
            const auto jj = static_cast<Eigen::Index>(j);
            double dj = true_cost_[j];
            if (m_ > 0) dj -= A_.col(jj).dot(y_);
            sol.z_lower[jj] = std::max(dj, 0.0);
            sol.z_upper[jj] = std::max(-dj, 0.0);
        }

        const double ptol = opt_.feasibility_tol;
        const double dtol = opt_.optimality_tol * cost_scale_;
        for (std::size_t i = 0; i < m_; ++i) {
            const std::size_t bi = basis_[i];
            if (bi >= n_ + m_ub_) {
                sol.primal_degenerate = true;  // redundant row kept an artificial
                continue;
            }
            const double v = value_[bi];
            if ((std::isfinite(lo_[bi]) && std::abs(v - lo_[bi]) <= ptol * (1.0 + std::abs(lo_[bi]))) ||
                (std::isfinite(up_[bi]) && std::abs(v - up_[bi]) <= ptol * (1.0 + std::abs(up_[bi])))) {
                sol.primal_degenerate = true;
            }
        }
        for (std::size_t j = 0; j < n_ + m_ub_; ++j) {
            if (state_[j] == VarState::Basic || is_fixed(j)) continue;
            double dj = cost_[j];
            if (m_ > 0) dj -= A_.col(static_cast<Eigen::Index>(j)).dot(y_);
            if (std::abs(dj) <= dtol) sol.dual_degenerate = true;
        }
    }

    SolverOptions opt_;
    std::size_t n_, m_eq_, m_ub_, m_, cols_;
    Eigen::MatrixXd A_;
    Eigen::VectorXd b_;
    std::vector<double> lo_, up_, cost_;
    std::vector<VarState> state_;
    std::vector<double> value_;
    std::vector<std::size_t> basis_;
    std::vector<double> true_cost_;
    RowMajorMatrix tab_;
    Eigen::VectorXd d_;
    Eigen::VectorXd y_;
    double cost_scale_ = 1.0;
    double phase_cost_scale_ = 1.0;
    double rhs_scale_ = 1.0;
    std::size_t iterations_ = 0;
};

}  // namespace

std::string to_string(LpStatus status) {
    switch (status) {
        case LpStatus::Optimal: return "optimal";
        case LpStatus::Infeasible: return "infeasible";
        case LpStatus::Unbounded: return "unbounded";
    }
    return "unknown";
}

void LpProblem::validate() const {
    const auto n = objective.size();
    auto fail = [](const std::string& what) { throw MalformedProblem("LpProblem: " + what); };
    if (lower_bounds.size() != n || upper_bounds.size() != n) fail("bound vectors must have num_vars entries");
    if (eq_matrix.rows() != eq_rhs.size()) fail("eq_matrix rows != eq_rhs size");
    if (ub_matrix.rows() != ub_rhs.size()) fail("ub_matrix rows != ub_rhs size");
    if (eq_matrix.rows() > 0 && eq_matrix.cols() != n) fail("eq_matrix cols != num_vars");
    if (ub_matrix.rows() > 0 && ub_matrix.cols() != n) fail("ub_matrix cols != num_vars");
    auto has_nan = [](const auto& m) { return m.size() > 0 && m.hasNaN(); };
    if (has_nan(objective) || has_nan(eq_matrix) || has_nan(eq_rhs) || has_nan(ub_matrix) || has_nan(ub_rhs) ||
        has_nan(lower_bounds) || has_nan(upper_bounds)) {
        fail("NaN entry");
    }
    if (!objective.allFinite() || (eq_matrix.size() > 0 && !eq_matrix.allFinite()) ||
        (ub_matrix.size() > 0 && !ub_matrix.allFinite())) {
        fail("infinite coefficient");
    }
    for (Eigen::Index j = 0; j < n; ++j) {
        if (lower_bounds[j] > upper_bounds[j]) fail("lower bound exceeds upper bound at x[" + std::to_string(j) + "]");
        if (lower_bounds[j] >= kInfinityThreshold || upper_bounds[j] <= -kInfinityThreshold) {
            fail("bound at x[" + std::to_string(j) + "] excludes every finite value");
        }
    }
}

LpSolution solve_lp(const LpProblem& problem, const SolverOptions& options) {
    problem.validate();
    Simplex simplex(problem, options);
    return simplex.run();
}

// ---------------------------------------------------------------------------

std::string to_string(KktCondition condition) {
    switch (condition) {
        case KktCondition::PrimalFeasibility: return "primal_feasibility";
        case KktCondition::DualFeasibility: return "dual_feasibility";
        case KktCondition::Stationarity: return "stationarity";
        case KktCondition::ComplementarySlackness: return "complementary_slackness";
    }
    return "unknown";
}

KktReport check_kkt(const LpProblem& p, const LpSolution& s, double tol) {
    KktReport report;
    const auto n = static_cast<Eigen::Index>(p.num_vars());
    auto add = [&](KktCondition c, std::string where, double mag) { report.push_back({c, std::move(where), mag}); };

    for (Eigen::Index i = 0; i < p.eq_rhs.size(); ++i) {
        const auto terms = p.eq_matrix.row(i).transpose().cwiseProduct(s.x);
        const double scale = std::max({1.0, std::abs(p.eq_rhs[i]), terms.cwiseAbs().maxCoeff()});
        const double r = std::abs(terms.sum() - p.eq_rhs[i]);
        if (r > tol * scale) add(KktCondition::PrimalFeasibility, "eq[" + std::to_string(i) + "]", r);
    }
    for (Eigen::Index k = 0; k < p.ub_rhs.size(); ++k) {
        const auto terms = p.ub_matrix.row(k).transpose().cwiseProduct(s.x);
        const double scale = std::max({1.0, std::abs(p.ub_rhs[k]), terms.cwiseAbs().maxCoeff()});
        const double lhs = terms.sum();
        const double viol = lhs - p.ub_rhs[k];
        if (viol > tol * scale) add(KktCondition::PrimalFeasibility, "ub[" + std::to_string(k) + "]", viol);
        const double y = s.y_ub[k];
        if (y < -tol) add(KktCondition::DualFeasibility, "ub[" + std::to_string(k) + "]", -y);
        const double cs = std::abs(y * (p.ub_rhs[k] - lhs));
        if (cs > tol * scale * std::max(1.0, std::abs(y))) {
            add(KktCondition::ComplementarySlackness, "ub[" + std::to_string(k) + "]", cs);
        }
    }
    for (Eigen::Index j = 0; j < n; ++j) {
        const double x = s.x[j];
        const double lo = p.lower_bounds[j];
        const double up = p.upper_bounds[j];
        const double scale = std::max(1.0, std::abs(x));
        const std::string name = "x[" + std::to_string(j) + "]";
        if (!is_infinite(lo) && lo - x > tol * scale) add(KktCondition::PrimalFeasibility, name + ".lower", lo - x);
        if (!is_infinite(up) && x - up > tol * scale) add(KktCondition::PrimalFeasibility, name + ".upper", x - up);
        const double zl = s.z_lower[j];
        const double zu = s.z_upper[j];
        if (zl < -tol) add(KktCondition::DualFeasibility, name + ".lower", -zl);
        if (zu < -tol) add(KktCondition::DualFeasibility, name + ".upper", -zu);
        const double cs_lo = is_infinite(lo) ? std::abs(zl) : std::abs(zl * (x - lo));
        const double cs_up = is_infinite(up) ? std::abs(zu) : std::abs(zu * (up - x));
        if (cs_lo > tol * scale * std::max(1.0, std::abs(zl))) add(KktCondition::ComplementarySlackness, name + ".lower", cs_lo);
        if (cs_up > tol * scale * std::max(1.0, std::abs(zu))) add(KktCondition::ComplementarySlackness, name + ".upper", cs_up);

        double resid = p.objective[j] - zl + zu;
        double mag = std::max({1.0, std::abs(p.objective[j]), std::abs(zl), std::abs(zu)});
        for (Eigen::Index i = 0; i < p.eq_rhs.size(); ++i) {
            const double t = p.eq_matrix(i, j) * s.y_eq[i];
            resid -= t;
            mag = std::max(mag, std::abs(t));
        }
        for (Eigen::Index k = 0; k < p.ub_rhs.size(); ++k) {
            const double t = p.ub_matrix(k, j) * s.y_ub[k];
            resid += t;
            mag = std::max(mag, std::abs(t));
        }
        if (std::abs(resid) > tol * mag) add(KktCondition::Stationarity, name, std::abs(resid));
    }
    return report;
}

std::vector<DualRange> eq_dual_ranges(const LpProblem& p, const LpSolution& s, const std::vector<std::size_t>& rows,
                                      double active_tol) {
    const auto n = static_cast<Eigen::Index>(p.num_vars());
    const auto m_eq = static_cast<Eigen::Index>(p.num_eq());
    LpBuilder b;
    std::vector<LpBuilder::Terms> col(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < m_eq; ++i) {
        b.add_variable(-kInfinity, kInfinity, 0.0);
        for (Eigen::Index j = 0; j < n; ++j) {
            if (p.eq_matrix(i, j) != 0.0) col[static_cast<std::size_t>(j)].emplace_back(static_cast<std::size_t>(i), p.eq_matrix(i, j));
        }
    }
    for (Eigen::Index k = 0; k < p.ub_rhs.size(); ++k) {
        const double lhs = p.ub_matrix.row(k).dot(s.x);
        if (p.ub_rhs[k] - lhs > active_tol * std::max(1.0, std::abs(p.ub_rhs[k]))) continue;
        const std::size_t v = b.add_variable(0.0, kInfinity, 0.0);
        for (Eigen::Index j = 0; j < n; ++j) {
            if (p.ub_matrix(k, j) != 0.0) col[static_cast<std::size_t>(j)].emplace_back(v, -p.ub_matrix(k, j));
        }
    }
    for (Eigen::Index j = 0; j < n; ++j) {
        const double lo = p.lower_bounds[j], up = p.upper_bounds[j], x = s.x[j];
        auto& terms = col[static_cast<std::size_t>(j)];
        if (!is_infinite(lo) && x - lo <= active_tol * std::max(1.0, std::abs(lo))) {
            terms.emplace_back(b.add_variable(0.0, kInfinity, 0.0), 1.0);
        }
        if (!is_infinite(up) && up - x <= active_tol * std::max(1.0, std::abs(up))) {
            terms.emplace_back(b.add_variable(0.0, kInfinity, 0.0), -1.0);
        }
        b.add_eq_row(terms, p.objective[j]);
    }

    std::vector<DualRange> out;
    for (std::size_t row : rows) {
        const double y = s.y_eq[static_cast<Eigen::Index>(row)];
        DualRange r{y, y};
        for (double sign : {1.0, -1.0}) {
            b.set_cost(row, sign);
            const LpSolution e = solve_lp(b.build());
            double v = y;
            if (e.status == LpStatus::Unbounded) v = -sign * kInfinity;
            else if (e.status == LpStatus::Optimal) v = e.x[static_cast<Eigen::Index>(row)];
            (sign > 0 ? r.lo : r.hi) = v;
        }
        b.set_cost(row, 0.0);
        out.push_back(r);
    }
    return out;
}

// ---------------------------------------------------------------------------

std::size_t LpBuilder::add_variable(double lower, double upper, double cost) {
    lower_.push_back(lower);
    upper_.push_back(upper);
    costs_.push_back(cost);
    return costs_.size() - 1;
}

std::size_t LpBuilder::add_eq_row(const Terms& terms, double rhs) {
    eq_rows_.push_back({terms, rhs});
    return eq_rows_.size() - 1;
}

std::size_t LpBuilder::add_ub_row(const Terms& terms, double rhs) {
    ub_rows_.push_back({terms, rhs});
    return ub_rows_.size() - 1;
}

LpProblem LpBuilder::build() const {
    const auto n = static_cast<Eigen::Index>(costs_.size());
    LpProblem p;
    p.objective = Eigen::VectorXd::Map(costs_.data(), n);
    p.lower_bounds = Eigen::VectorXd::Map(lower_.data(), n);
    p.upper_bounds = Eigen::VectorXd::Map(upper_.data(), n);
    auto fill = [n](const std::vector<Row>& rows, Eigen::MatrixXd& mat, Eigen::VectorXd& rhs) {
        mat = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), n);
        rhs.resize(static_cast<Eigen::Index>(rows.size()));
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto r = static_cast<Eigen::Index>(i);
            for (const auto& [var, coef] : rows[i].terms) {
                if (static_cast<Eigen::Index>(var) >= n) throw MalformedProblem("LpBuilder: row references unknown variable");
                mat(r, static_cast<Eigen::Index>(var)) += coef;
            }
            rhs[r] = rows[i].rhs;
        }
    };
    fill(eq_rows_, p.eq_matrix, p.eq_rhs);
    fill(ub_rows_, p.ub_matrix, p.ub_rhs);
    return p;
}

}  // namespace tlmp
