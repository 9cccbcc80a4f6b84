#include "drts/problem.hpp"

namespace drts {

LpSolution solve_second_stage(const SecondStageLp& ss, const Vec& x) {
    LinearProgram lp = ss.lp;
    if (ss.xcoef.rows() > 0) {
        Vec shift = ss.xcoef * x;
        for (Eigen::Index i = 0; i < shift.size(); ++i) lp.rows[i].rhs -= shift[i];
    }
    LpSolution s = solve_lp(lp);
    if (s.status != LpStatus::Optimal)
        throw NumericalFailure("second-stage LP failed to solve");
    return s;
}

double TwoStageProblem::g(const Vec& x, Scenario a) const {
    if (a.empty()) return 0.0;
    std::vector<double> key(x.data(), x.data() + x.size());
    auto it = g_cache_.find({key, a.mask});
    if (it != g_cache_.end()) return it->second;
    double value = std::max(0.0, solve_second_stage(second_stage(a), x).value);
    g_cache_.insert({{std::move(key), a.mask}, value});
    return value;
}

Vec TwoStageProblem::scenario_subgradient(const Vec& x, Scenario a) const {
    if (a.empty()) return Vec::Zero(dim());
    SecondStageLp ss = second_stage(a);
    LpSolution s = solve_second_stage(ss, x);
    Vec dual(static_cast<Eigen::Index>(s.dual.size()));
    for (std::size_t i = 0; i < s.dual.size(); ++i) dual[static_cast<Eigen::Index>(i)] = s.dual[i];
    // g(x,A) = value(rhs0 - xcoef*x); d/dx = -xcoef^T * dual.
    Vec d = -ss.xcoef.transpose() * dual;
    // Clamp tiny sign violations from degenerate duals.
    for (Eigen::Index j = 0; j < d.size(); ++j) d[j] = std::min(d[j], 0.0);
    return d;
}

}  // namespace drts
