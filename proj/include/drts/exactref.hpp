#ifndef DRTS_EXACTREF_HPP
#define DRTS_EXACTREF_HPP

#include <optional>
#include <vector>

#include "drts/gxy.hpp"
#include "drts/problem.hpp"

namespace drts {

/// All scenarios over the problem's ground set, optionally size-bounded.
/// Guarded at 4096 scenarios; intended for brute-force reference only.
class EnumeratedUniverse {
  public:
    explicit EnumeratedUniverse(int ground_size, std::optional<int> k_bound = std::nullopt);

    const std::vector<Scenario>& scenarios() const { return scenarios_; }
    int ground_size() const { return ground_size_; }

  private:
    int ground_size_;
    std::vector<Scenario> scenarios_;
};

struct InnerMaxResult {
    double value = 0.0;                       // c'x + worst-case expectation
    double expectation = 0.0;                 // the inner max alone
    std::vector<TransportPlanEntry> plan;     // Wasserstein witness
    std::vector<std::pair<Scenario, double>> q;  // Linf witness distribution
};

/// Exact h_p(x) for either ball type, solved over the full enumerated
/// scenario set by LP.
InnerMaxResult exact_inner_max(const TwoStageProblem& problem, const Vec& x,
                               const AmbiguityBall& ball, const EnumeratedUniverse& universe);

struct DiscreteOptimum {
    Vec x;
    double value = 0.0;
};

/// Brute force over x in {0,1}^m (m <= 16), lexicographic tie-break.
DiscreteOptimum exact_discrete_optimum(const TwoStageProblem& problem, const AmbiguityBall& ball,
                                       const EnumeratedUniverse& universe);

/// Exhaustive argmax of g(x,A') - y*sigma(A,A'), guarantee (1,1).
GxyResult exact_gxy(const TwoStageProblem& problem, const Vec& x, double y, Scenario a,
                    const ScenarioMetric& metric, const EnumeratedUniverse& universe);

}  // namespace drts

#endif
