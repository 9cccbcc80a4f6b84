#ifndef DRTS_LP_HPP
#define DRTS_LP_HPP

#include <limits>
#include <vector>

#include "drts/common.hpp"
#include "drts/scenario.hpp"

namespace drts {

enum class Sense { Min, Max };
enum class Relation { Le, Eq, Ge };
enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpRow {
    std::vector<std::pair<int, double>> coeffs;  // (variable, coefficient)
    Relation rel = Relation::Le;
    double rhs = 0.0;
};

/// Dense LP in natural form. Variables default to [0, +inf); finite upper
/// bounds are handled internally.
struct LinearProgram {
    Sense sense = Sense::Min;
    std::vector<double> objective;
    std::vector<LpRow> rows;
    std::vector<double> upper;  // per-variable upper bound, +inf by default

    int add_variable(double obj_coeff, double upper_bound = std::numeric_limits<double>::infinity()) {
        objective.push_back(obj_coeff);
        upper.push_back(upper_bound);
        return static_cast<int>(objective.size()) - 1;
    }
    void add_row(LpRow row) { rows.push_back(std::move(row)); }
    int num_vars() const { return static_cast<int>(objective.size()); }
};

struct LpSolution {
    LpStatus status = LpStatus::Optimal;
    double value = 0.0;
    std::vector<double> primal;
    /// One multiplier per row of the input LP (upper-bound rows excluded).
    /// Sign convention: for Min, duals of Ge rows are >= 0 and of Le rows
    /// are <= 0; for Max the signs flip. value == sum_i dual[i]*rhs[i] plus
    /// upper-bound contributions.
    std::vector<double> dual;
};

/// Primal simplex (dense, two-phase, Bland anti-cycling fallback).
/// Throws NumericalFailure after 50*(rows+cols) pivots.
LpSolution solve_lp(const LinearProgram& lp);

/// One candidate transport column: move mass from support scenario `row` to
/// target scenario with payoff `g_value` and movement cost `sigma`.
struct TransportColumn {
    int row = 0;
    Scenario target;
    double g_value = 0.0;
    double sigma = 0.0;
};

struct TransportLpSpec {
    std::vector<double> row_mass;  // hat-p_A per support scenario
    std::vector<TransportColumn> columns;
    double budget = 0.0;  // r
};

struct TransportPlanEntry {
    int row = 0;
    Scenario target;
    double mass = 0.0;
};

struct TransportSolution {
    double value = 0.0;
    std::vector<TransportPlanEntry> plan;
    std::vector<double> row_dual;  // theta_A, one per support row
    double budget_dual = 0.0;      // y
};

/// Restricted transport LP: maximize sum gamma*g over the given columns
/// subject to per-row mass caps and the sigma-budget. The returned plan is
/// feasible for the unrestricted transport problem.
TransportSolution solve_transport_restricted(const TransportLpSpec& spec);

}  // namespace drts

#endif
