#ifndef DRTS_PROBLEM_HPP
#define DRTS_PROBLEM_HPP

#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "drts/lp.hpp"
#include "drts/scenario.hpp"

namespace drts {

/// Second-stage LP for a fixed scenario with the first-stage dependence kept
/// explicit: the LP stored here is for x = 0, and the actual right-hand side
/// at x is rhs0 - xcoef * x (row-wise). This makes the per-scenario
/// subgradient d^{x,A} = -xcoef^T * dual available from a single solve.
struct SecondStageLp {
    LinearProgram lp;  // rhs fields hold rhs0
    Mat xcoef;         // rows(lp) x m
};

struct RoundedRecourse {
    double cost = 0.0;          // integral second-stage cost
    std::vector<int> actions;   // problem-specific action ids
};

/// Two-stage problem over X subset of {0,1}^m with P = [0,1]^m.
/// Encodes (P1)-(P6): c >= 0, 0 in X, g monotone nonincreasing in x,
/// g(0,A) <= g(x,A) + lambda*c'x, and |g(x,A') - g(x,A)| <= tau*sigma(A,A').
class TwoStageProblem {
  public:
    virtual ~TwoStageProblem() = default;

    virtual int dim() const = 0;          // m, first-stage dimension
    virtual int ground_size() const = 0;  // |U|, scenario universe bits
    virtual const Vec& first_stage_cost() const = 0;
    virtual double inflation() const = 0;  // lambda >= 1
    virtual double tau() const = 0;        // (P6) constant
    virtual bool monotone() const { return true; }

    virtual SecondStageLp second_stage(Scenario a) const = 0;

    /// Optimal fractional second-stage cost. Cached per (x, A).
    double g(const Vec& x, Scenario a) const;

    /// d^{x,A}: satisfies g(x',A) >= g(x,A) + d.(x'-x) and -lambda*c <= d <= 0.
    Vec scenario_subgradient(const Vec& x, Scenario a) const;

    // Polytope bounds for P = [0,1]^m.
    double bound_R() const { return std::sqrt(static_cast<double>(dim())); }
    double bound_V() const { return 0.5; }
    double bound_K() const { return inflation() * first_stage_cost().norm(); }

    /// rho-local rounder: x in P -> x_tilde in X. Per-scenario certificates
    /// are checked by integral_recourse against local_rho in tests.
    virtual Vec local_round(const Vec& x) const = 0;
    virtual double local_rho() const = 0;

    /// Best integral recourse completing integral x on scenario a
    /// (alpha-approximate relative to g(x,a); exact at desk scale where
    /// implementations enumerate).
    virtual RoundedRecourse integral_recourse(const Vec& x, Scenario a) const = 0;
    virtual double deterministic_alpha() const = 0;

  private:
    mutable std::map<std::pair<std::vector<double>, std::uint64_t>, double> g_cache_;
};

/// Shared helper: solve the second-stage LP at x and also return duals.
LpSolution solve_second_stage(const SecondStageLp& ss, const Vec& x);

}  // namespace drts

#endif
