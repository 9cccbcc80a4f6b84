#ifndef DRTS_GXY_HPP
#define DRTS_GXY_HPP

#include <functional>
#include <vector>

#include "drts/problem.hpp"

namespace drts {

/// Result of a g(x,y,A) oracle: a scenario A-bar and the attained value
/// g(x,A-bar) - y*sigma(A,A-bar), with its (beta1,beta2) guarantee:
/// value >= g(x,A')/beta1 - beta2*y*sigma(A,A') for every A'.
struct GxyResult {
    Scenario scenario;
    double value = 0.0;
    double beta1 = 1.0, beta2 = 1.0;
};

/// Oracle interface used by the transport machinery: (x, y, A) -> GxyResult.
using GxyOracleFn = std::function<GxyResult(const Vec&, double, Scenario)>;

/// A beta-approximate unconstrained worst-scenario oracle: returns A-bar with
/// g(x,A-bar) >= max_{A'} g(x,A')/beta.
using MaxminOracleFn = std::function<Scenario(const Vec&)>;

/// A beta-approximate sigma-constrained oracle: returns A-bar with
/// g(x,A-bar) >= max_{A': sigma(A,A') <= mu} g(x,A')/beta.
using ConstrainedOracleFn = std::function<Scenario(const Vec&, Scenario, double)>;

/// Discrete metric: g(x,y,A) = max{g(x,A), max_{A'} g(x,A') - y}.
/// Guarantee (beta, 1).
GxyResult gxy_discrete(const TwoStageProblem& problem, const Vec& x, double y, Scenario a,
                       const MaxminOracleFn& maxmin_oracle, double beta);

/// Reduction over sigma values: eps <= 0 enumerates every distinct sigma
/// value (guarantee (beta,1)); eps > 0 uses {0} plus the geometric grid
/// (1+eps)^i * sigma_min up to sigma_max (guarantee (beta,1+eps)).
GxyResult gxy_enumerated(const TwoStageProblem& problem, const Vec& x, double y, Scenario a,
                         const ScenarioMetric& metric, const ConstrainedOracleFn& oracle,
                         double beta, double eps);

/// Collapse of a scenario for monotone problems: a polynomial list that
/// contains an optimizer of g(x,y,A) for every (x,y). Discrete: {A, U};
/// AsymInf: the distance-thresholded maximal scenarios.
std::vector<Scenario> collapse(const TwoStageProblem& problem, Scenario a,
                               const ScenarioMetric& metric);

struct ApproxTransportResult {
    TransportSolution transport;
    double beta1 = 1.0, beta2 = 1.0;  // certified approximation of the value
    int oracle_calls = 0;
};

/// Column generation on (T_{p,x}): restricted primal over collected columns,
/// new columns priced by the gxy oracle at the current duals. The returned
/// plan is feasible and its value is >= OPT/(beta1*beta2) - e with
/// e = 2^-40 * objective scale.
ApproxTransportResult approx_transport(const TwoStageProblem& problem, const Vec& x,
                                       const ExplicitDistribution& p_hat, double r,
                                       const ScenarioMetric& metric, const GxyOracleFn& oracle);

/// argmax_{|A|<=k} g(x,A) by enumeration; ground set guarded at 20 bits.
Scenario kmaxmin_bruteforce(const TwoStageProblem& problem, const Vec& x, int k);

class FacilityLocationProblem;

struct CostShareTable {
    std::vector<int> clients;     // J
    std::vector<double> share;    // xi(J, j) aligned with clients
    double total = 0.0;

    double share_of(int client) const {
        for (std::size_t i = 0; i < clients.size(); ++i)
            if (clients[i] == client) return share[i];
        return 0.0;
    }
};

/// Pal-Tardos style cost shares xi(J,j) = min_i max{t(J,i), d_ij}, where
/// t(J,i) is the ghost-process opening time of facility i (clients in J grow
/// balls uniformly; i opens when the collected contribution pays its cost).
/// Facilities opened by x are free (t = 0).
CostShareTable fl_cost_shares(const FacilityLocationProblem& fl, const Vec& x, Scenario clients);

/// Greedy k-max-min for facility location via cost shares ((6,1)-approx).
Scenario kmaxmin_fl_greedy(const FacilityLocationProblem& fl, const Vec& x, int k);

/// Greedy marginal-value heuristic for covering problems; factor measured
/// against brute force in tests, not certified.
Scenario kmaxmin_cover_heuristic(const TwoStageProblem& problem, const Vec& x, int k);

}  // namespace drts

#endif
