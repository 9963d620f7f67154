#include "tlmp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace tlmp {

namespace {

struct HalfSpace {
    Eigen::VectorXd normal;  // normal' x <= rhs
    double rhs;
};

// Calls visit(subset) for every k-subset of {0..count-1}, in lexicographic order.
void for_each_subset(std::size_t count, std::size_t k, const std::function<void(const std::vector<std::size_t>&)>& visit) {
    if (k > count) return;
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    for (;;) {
        visit(idx);
        if (k == 0) return;
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == count - k + i - 1) --i;
        if (i == 0) return;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

std::vector<HalfSpace> inequality_constraints(const LpProblem& p) {
    const auto n = static_cast<Eigen::Index>(p.num_vars());
    std::vector<HalfSpace> out;
    for (Eigen::Index k = 0; k < p.ub_rhs.size(); ++k) out.push_back({p.ub_matrix.row(k).transpose(), p.ub_rhs[k]});
    for (Eigen::Index j = 0; j < n; ++j) {
        if (!is_infinite(p.lower_bounds[j])) out.push_back({-Eigen::VectorXd::Unit(n, j), -p.lower_bounds[j]});
        if (!is_infinite(p.upper_bounds[j])) out.push_back({Eigen::VectorXd::Unit(n, j), p.upper_bounds[j]});
    }
    return out;
}

}  // namespace

const Vertex* VertexEnumeration::best() const {
    const Vertex* out = nullptr;
    for (const auto& v : vertices) {
        if (out == nullptr || v.objective < out->objective) out = &v;
    }
    return out;
}

VertexEnumeration enumerate_vertices(const LpProblem& p, double tol) {
    p.validate();
    const std::size_t n = p.num_vars();
    if (n > kMaxEnumerationVars) {
        throw TooLarge("enumerate_vertices supports at most " + std::to_string(kMaxEnumerationVars) + " variables, got " +
                       std::to_string(n));
    }
    const auto nn = static_cast<Eigen::Index>(n);
    const auto m_eq = static_cast<Eigen::Index>(p.num_eq());
    const auto halfspaces = inequality_constraints(p);

    std::size_t eq_rank = 0;
    if (m_eq > 0) {
        Eigen::FullPivLU<Eigen::MatrixXd> lu(p.eq_matrix);
        lu.setThreshold(1e-10);
        eq_rank = static_cast<std::size_t>(lu.rank());
    }

    auto feasible = [&](const Eigen::VectorXd& x) {
        for (Eigen::Index i = 0; i < m_eq; ++i) {
            const double scale = std::max(1.0, std::abs(p.eq_rhs[i]));
            if (std::abs(p.eq_matrix.row(i).dot(x) - p.eq_rhs[i]) > tol * scale * 10.0) return false;
        }
        for (const auto& h : halfspaces) {
            if (h.normal.dot(x) - h.rhs > tol * std::max(1.0, std::abs(h.rhs)) * 10.0) return false;
        }
        return true;
    };

    VertexEnumeration result;
    if (eq_rank <= n) {
        const std::size_t k = n - eq_rank;
        for_each_subset(halfspaces.size(), k, [&](const std::vector<std::size_t>& subset) {
            const auto rows = m_eq + static_cast<Eigen::Index>(subset.size());
            if (rows == 0) return;
            Eigen::MatrixXd M(rows, nn);
            Eigen::VectorXd rhs(rows);
            if (m_eq > 0) {
                M.topRows(m_eq) = p.eq_matrix;
                rhs.head(m_eq) = p.eq_rhs;
            }
            for (std::size_t s = 0; s < subset.size(); ++s) {
                M.row(m_eq + static_cast<Eigen::Index>(s)) = halfspaces[subset[s]].normal.transpose();
                rhs[m_eq + static_cast<Eigen::Index>(s)] = halfspaces[subset[s]].rhs;
            }
            Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
            lu.setThreshold(1e-10);
            if (static_cast<std::size_t>(lu.rank()) < n) return;
            Eigen::VectorXd x = lu.solve(rhs);
            if (!x.allFinite() || (M * x - rhs).cwiseAbs().maxCoeff() > 1e-8 * std::max(1.0, rhs.cwiseAbs().maxCoeff())) return;
            if (!feasible(x)) return;
            for (const auto& v : result.vertices) {
                if ((v.x - x).cwiseAbs().maxCoeff() <= 1e-9 * std::max(1.0, x.cwiseAbs().maxCoeff())) return;
            }
            result.vertices.push_back({x, p.objective.dot(x)});
        });
    }

    // Extreme rays of the recession cone {A_eq d = 0, h.normal' d <= 0}.
    if (n > eq_rank) {
        const std::size_t k = n - 1 - eq_rank;
        for_each_subset(halfspaces.size(), k, [&](const std::vector<std::size_t>& subset) {
            if (result.unbounded) return;
            const auto rows = m_eq + static_cast<Eigen::Index>(subset.size());
            Eigen::MatrixXd dir_basis;
            if (rows == 0) {
                if (n != 1) return;
                dir_basis = Eigen::MatrixXd::Identity(1, 1);
            } else {
                Eigen::MatrixXd M(rows, nn);
                if (m_eq > 0) M.topRows(m_eq) = p.eq_matrix;
                for (std::size_t s = 0; s < subset.size(); ++s) {
                    M.row(m_eq + static_cast<Eigen::Index>(s)) = halfspaces[subset[s]].normal.transpose();
                }
                Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
                lu.setThreshold(1e-10);
                if (static_cast<std::size_t>(lu.rank()) != n - 1) return;
                dir_basis = lu.kernel();
            }
            for (double sign : {1.0, -1.0}) {
                const Eigen::VectorXd d = sign * dir_basis.col(0).normalized();
                bool in_cone = true;
                for (Eigen::Index i = 0; i < m_eq && in_cone; ++i) {
                    if (std::abs(p.eq_matrix.row(i).dot(d)) > 1e-9) in_cone = false;
                }
                for (const auto& h : halfspaces) {
                    if (!in_cone) break;
                    if (h.normal.dot(d) > 1e-9) in_cone = false;
                }
                if (in_cone && p.objective.dot(d) < -1e-9) result.unbounded = true;
            }
        });
    }
    if (result.vertices.empty()) result.unbounded = false;
    return result;
}

}  // namespace tlmp
