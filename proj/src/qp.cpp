#include "powerroute/qp.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "powerroute/errors.hpp"

namespace powerroute {

double SeparableQp::objective(const Eigen::VectorXd& x) const {
    return (quad.array() * x.array().square()).sum() + lin.dot(x) + constant;
}

namespace {

constexpr double kZeroRow = 1e-12;

double binomial(std::size_t n, std::size_t k) {
    double r = 1.0;
    for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

class WorkingSetSearch {
public:
    WorkingSetSearch(const SeparableQp& qp, std::vector<std::vector<std::size_t>> groups)
        : qp_(qp), groups_(std::move(groups)) {}

    QpSolution run(std::size_t max_active) {
        std::vector<std::size_t> chosen;
        for (std::size_t k = 0; k <= max_active; ++k) enumerate(0, k, chosen);
        return best_;
    }

private:
    void enumerate(std::size_t first_group, std::size_t remaining, std::vector<std::size_t>& chosen) {
        if (remaining == 0) {
            evaluate(chosen);
            return;
        }
        for (std::size_t g = first_group; g + remaining <= groups_.size(); ++g) {
            for (auto row : groups_[g]) {
                chosen.push_back(row);
                enumerate(g + 1, remaining - 1, chosen);
                chosen.pop_back();
            }
        }
    }

    void evaluate(const std::vector<std::size_t>& active) {
        const auto n = qp_.quad.size();
        const auto m_eq = qp_.eq.rows();
        const auto m = m_eq + static_cast<Eigen::Index>(active.size());
        Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + m, n + m);
        Eigen::VectorXd rhs(n + m);
        kkt.topLeftCorner(n, n).diagonal() = 2.0 * qp_.quad;
        rhs.head(n) = -qp_.lin;
        for (Eigen::Index r = 0; r < m_eq; ++r) {
            kkt.block(n + r, 0, 1, n) = qp_.eq.row(r);
            kkt.block(0, n + r, n, 1) = qp_.eq.row(r).transpose();
            rhs(n + r) = qp_.eq_rhs(r);
        }
        for (std::size_t i = 0; i < active.size(); ++i) {
            const auto r = m_eq + static_cast<Eigen::Index>(i);
            const auto row = static_cast<Eigen::Index>(active[i]);
            kkt.block(n + r, 0, 1, n) = qp_.ineq.row(row);
            kkt.block(0, n + r, n, 1) = qp_.ineq.row(row).transpose();
            rhs(n + r) = qp_.ineq_rhs(row);
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
        lu.setThreshold(1e-10);
        if (!lu.isInvertible()) return;
        const Eigen::VectorXd sol = lu.solve(rhs);
        const Eigen::VectorXd x = sol.head(n);

        if (m_eq > 0 && ((qp_.eq * x - qp_.eq_rhs).cwiseAbs().maxCoeff() > kQpFeasibilityTolerance)) return;
        if (qp_.ineq.rows() > 0 && ((qp_.ineq * x - qp_.ineq_rhs).maxCoeff() > kQpFeasibilityTolerance)) return;

        const double value = qp_.objective(x);
        if (best_.feasible && !(value < best_.objective - 1e-9 * (1.0 + std::abs(best_.objective)))) return;
        best_.feasible = true;
        best_.x = x;
        best_.objective = value;
        best_.working_set = active;
    }

    const SeparableQp& qp_;
    std::vector<std::vector<std::size_t>> groups_;
    QpSolution best_;
};

}  // namespace

QpSolution solve_qp(const SeparableQp& problem, std::size_t budget) {
    const auto n = static_cast<std::size_t>(problem.quad.size());
    const auto m_eq = static_cast<std::size_t>(problem.eq.rows());

    // Rows with no dependence on x can never be part of a nonsingular working set;
    // they still take part in the feasibility test.
    std::map<std::size_t, std::vector<std::size_t>> by_label;
    for (Eigen::Index r = 0; r < problem.ineq.rows(); ++r) {
        if (problem.ineq.row(r).cwiseAbs().maxCoeff() <= kZeroRow) {
            if (problem.ineq_rhs(r) < -kQpFeasibilityTolerance) return {};
            continue;
        }
        by_label[problem.ineq_group.at(static_cast<std::size_t>(r))].push_back(static_cast<std::size_t>(r));
    }
    std::vector<std::vector<std::size_t>> groups;
    for (auto& [label, rows] : by_label) groups.push_back(std::move(rows));

    const std::size_t max_active = std::min(n > m_eq ? n - m_eq : 0, groups.size());
    std::size_t widest = 1;
    for (const auto& g : groups) widest = std::max(widest, g.size());
    double work = 0.0;
    for (std::size_t k = 0; k <= max_active; ++k) {
        work += binomial(groups.size(), k) * std::pow(static_cast<double>(widest), static_cast<double>(k));
    }
    if (work > static_cast<double>(budget)) {
        throw SolverLimit("dispatch problem needs ~" + std::to_string(static_cast<long long>(work)) +
                          " working sets, budget is " + std::to_string(budget));
    }
    return WorkingSetSearch(problem, std::move(groups)).run(max_active);
}

}  // namespace powerroute
