#include "drts/lp.hpp"

#include <algorithm>
#include <cmath>

namespace drts {

namespace {

constexpr double kPivotTol = 1e-8;
constexpr double kCostTol = 1e-9;
constexpr double kFeasTol = 1e-7;

struct Tableau {
    Mat t;                   // m x (n+1), last column is rhs
    std::vector<double> cost;  // current phase objective over all columns
    std::vector<int> basis;    // basic variable per row
    std::vector<char> banned;  // columns never allowed to enter
    int m = 0, n = 0;
    long pivots = 0;
    long pivot_limit = 0;

    double rhs(int i) const { return t(i, n); }

    void pivot(int row, int col) {
        double piv = t(row, col);
        t.row(row) /= piv;
        for (int i = 0; i < m; ++i) {
            if (i == row) continue;
            double f = t(i, col);
            if (f != 0.0) t.row(i) -= f * t.row(row);
        }
        basis[row] = col;
        ++pivots;
    }

    // Reduced cost row for the given phase costs.
    Vec reduced_costs() const {
        Vec cb(m);
        for (int i = 0; i < m; ++i) cb[i] = cost[basis[i]];
        Vec r(n);
        for (int j = 0; j < n; ++j) r[j] = cost[j] - cb.dot(t.col(j));
        return r;
    }

    // Runs the simplex for the current cost vector; returns false on
    // unboundedness. Dantzig rule with a permanent switch to Bland after a
    // run of degenerate pivots.
    bool optimize() {
        int degenerate_run = 0;
        bool bland = false;
        while (true) {
            Vec r = reduced_costs();
            int enter = -1;
            if (bland) {
                for (int j = 0; j < n; ++j)
                    if (!banned[j] && r[j] < -kCostTol) { enter = j; break; }
            } else {
                double best = -kCostTol;
                for (int j = 0; j < n; ++j)
                    if (!banned[j] && r[j] < best) { best = r[j]; enter = j; }
            }
            if (enter < 0) return true;

            int leave = -1;
            double best_ratio = 0.0;
            for (int i = 0; i < m; ++i) {
                double a = t(i, enter);
                if (a <= kPivotTol) continue;
                double ratio = rhs(i) / a;
                if (leave < 0 || ratio < best_ratio - 1e-12 ||
                    (ratio < best_ratio + 1e-12 && basis[i] < basis[leave])) {
                    leave = i;
                    best_ratio = ratio;
                }
            }
            if (leave < 0) return false;  // unbounded

            if (best_ratio < 1e-12) {
                if (++degenerate_run >= 20) bland = true;
            } else {
                degenerate_run = 0;
            }
            pivot(leave, enter);
            if (pivots > pivot_limit)
                throw NumericalFailure("simplex pivot limit exhausted");
        }
    }
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp) {
    const int n_orig = lp.num_vars();
    const int n_user_rows = static_cast<int>(lp.rows.size());

    // Assemble the row set: user rows, then upper-bound rows.
    struct ERow {
        std::vector<std::pair<int, double>> coeffs;
        Relation rel;
        double rhs;
    };
    std::vector<ERow> erows;
    erows.reserve(lp.rows.size() + 4);
    for (const auto& row : lp.rows) erows.push_back({row.coeffs, row.rel, row.rhs});
    for (int j = 0; j < n_orig; ++j)
        if (std::isfinite(lp.upper[j]))
            erows.push_back({{{j, 1.0}}, Relation::Le, lp.upper[j]});

    const int m = static_cast<int>(erows.size());
    const bool maximize = lp.sense == Sense::Max;

    // Standard form: min c'x, Ax = b, x >= 0, b >= 0.
    // Columns: [structural | slack/surplus | artificial-per-row].
    int n_slack = 0;
    for (const auto& r : erows)
        if (r.rel != Relation::Eq) ++n_slack;
    const int n_all = n_orig + n_slack + m;

    Tableau tab;
    tab.m = m;
    tab.n = n_all;
    tab.t = Mat::Zero(m, n_all + 1);
    tab.banned.assign(n_all, 0);
    tab.basis.resize(m);
    tab.pivot_limit = 50L * (m + n_all) + 200;

    std::vector<int> row_sign(m, 1);
    {
        int slack = n_orig;
        for (int i = 0; i < m; ++i) {
            for (auto [j, a] : erows[i].coeffs) tab.t(i, j) += a;
            if (erows[i].rel == Relation::Le) tab.t(i, slack++) = 1.0;
            else if (erows[i].rel == Relation::Ge) tab.t(i, slack++) = -1.0;
            tab.t(i, n_all) = erows[i].rhs;
            if (tab.t(i, n_all) < 0) {
                tab.t.row(i) = -tab.t.row(i);
                row_sign[i] = -1;
            }
            tab.t(i, n_orig + n_slack + i) = 1.0;
            tab.basis[i] = n_orig + n_slack + i;
        }
    }
    const Mat eq_matrix = tab.t.leftCols(n_all);  // for dual recovery

    // Phase 1: minimize the sum of artificials.
    tab.cost.assign(n_all, 0.0);
    for (int i = 0; i < m; ++i) tab.cost[n_orig + n_slack + i] = 1.0;
    if (!tab.optimize())
        throw NumericalFailure("phase-1 unbounded (inconsistent tableau)");
    double art_sum = 0.0;
    for (int i = 0; i < m; ++i)
        if (tab.basis[i] >= n_orig + n_slack) art_sum += tab.rhs(i);
    if (art_sum > kFeasTol * (1.0 + tab.t.col(n_all).cwiseAbs().maxCoeff())) {
        LpSolution sol;
        sol.status = LpStatus::Infeasible;
        return sol;
    }
    // Drive remaining artificials out of the basis where possible.
    for (int i = 0; i < m; ++i) {
        if (tab.basis[i] < n_orig + n_slack) continue;
        for (int j = 0; j < n_orig + n_slack; ++j) {
            if (std::abs(tab.t(i, j)) > kPivotTol) {
                tab.pivot(i, j);
                break;
            }
        }
    }

    // Phase 2.
    for (int j = n_orig + n_slack; j < n_all; ++j) tab.banned[j] = 1;
    tab.cost.assign(n_all, 0.0);
    for (int j = 0; j < n_orig; ++j)
        tab.cost[j] = maximize ? -lp.objective[j] : lp.objective[j];
    if (!tab.optimize()) {
        LpSolution sol;
        sol.status = LpStatus::Unbounded;
        return sol;
    }

    LpSolution sol;
    sol.status = LpStatus::Optimal;
    sol.primal.assign(n_orig, 0.0);
    for (int i = 0; i < m; ++i)
        if (tab.basis[i] < n_orig) sol.primal[tab.basis[i]] = tab.rhs(i);
    sol.value = 0.0;
    for (int j = 0; j < n_orig; ++j) sol.value += lp.objective[j] * sol.primal[j];

    // Dual: solve B' y = c_B on the original equality-form matrix, then undo
    // row negations and drop upper-bound rows.
    Mat basis_cols(m, m);
    Vec cb(m);
    for (int i = 0; i < m; ++i) {
        basis_cols.col(i) = eq_matrix.col(tab.basis[i]);
        cb[i] = tab.cost[tab.basis[i]];
    }
    Vec y = basis_cols.transpose().fullPivLu().solve(cb);
    sol.dual.assign(n_user_rows, 0.0);
    for (int i = 0; i < n_user_rows; ++i) {
        double yi = y[i] * row_sign[i];
        sol.dual[i] = maximize ? -yi : yi;
    }
    return sol;
}

TransportSolution solve_transport_restricted(const TransportLpSpec& spec) {
    if (spec.columns.empty()) throw Error("transport LP needs at least one candidate column");
    const int n_rows = static_cast<int>(spec.row_mass.size());
    const int n_cols = static_cast<int>(spec.columns.size());

    LinearProgram lp;
    lp.sense = Sense::Max;
    for (const auto& col : spec.columns) lp.add_variable(col.g_value);
    std::vector<LpRow> mass_rows(n_rows);
    LpRow budget_row;
    for (int j = 0; j < n_cols; ++j) {
        mass_rows[spec.columns[j].row].coeffs.push_back({j, 1.0});
        if (spec.columns[j].sigma != 0.0)
            budget_row.coeffs.push_back({j, spec.columns[j].sigma});
    }
    for (int i = 0; i < n_rows; ++i) {
        mass_rows[i].rel = Relation::Le;
        mass_rows[i].rhs = spec.row_mass[i];
        lp.add_row(std::move(mass_rows[i]));
    }
    budget_row.rel = Relation::Le;
    budget_row.rhs = spec.budget;
    lp.add_row(std::move(budget_row));

    LpSolution s = solve_lp(lp);
    if (s.status != LpStatus::Optimal)
        throw NumericalFailure("transport LP did not solve to optimality");

    TransportSolution out;
    out.value = s.value;
    for (int j = 0; j < n_cols; ++j)
        if (s.primal[j] > 1e-12)
            out.plan.push_back({spec.columns[j].row, spec.columns[j].target, s.primal[j]});
    out.row_dual.assign(n_rows, 0.0);
    for (int i = 0; i < n_rows; ++i) out.row_dual[i] = std::max(0.0, s.dual[i]);
    out.budget_dual = std::max(0.0, s.dual[n_rows]);
    return out;
}

}  // namespace drts
