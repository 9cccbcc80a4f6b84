#ifndef DRTS_SAA_HPP
#define DRTS_SAA_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "drts/problem.hpp"

namespace drts {

/// N = ceil(C * (lambda/eps)^2 * (log_X + log_tau_over_kappa + ln(1/delta))).
/// The theorem states only poly(...); C is exposed and defaults to 4.
int sample_count(double eps, double delta, double lambda, double log_x,
                 double log_tau_over_kappa, double c = 4.0);

struct SaaConfig {
    double eps = 1.0 / 3.0;  // in (0, 1/3]
    double delta = 0.1;
    double kappa = 0.0;
    int replicates = 0;  // 0: default ceil((2/eps) ln(1/delta))
    int n_samples = 100;
    std::uint64_t seed = 0;

    int effective_replicates() const;
};

struct SaaReplicate {
    Vec x;
    double f = 0.0;
    std::uint64_t seed = 0;
};

struct SaaReport {
    std::vector<SaaReplicate> replicates;
    int selected = 0;  // argmin f, first on ties
    Vec x_hat;
    double f_hat = 0.0;
};

/// Solves one empirical instance: returns (x-hat, f) with the (S1)/(S2)
/// estimate contract (solve_saa_poly qualifies with beta = beta1*beta2).
using SaaSolverFn = std::function<std::pair<Vec, double>(const ExplicitDistribution& p_hat)>;

/// Builds k empirical estimates with seeds split_seed(seed, i), solves each,
/// and selects the argmin-f replicate. `seeds` overrides the derived stream
/// (used to check permutation invariance of the selected value).
SaaReport run_saa(const CentralDistribution& center, const SaaConfig& config,
                  const SaaSolverFn& solver,
                  const std::optional<std::vector<std::uint64_t>>& seeds = std::nullopt);

struct ShortLongDecomposition {
    double m_threshold = 0.0;  // M = lambda * r
    double z_short = 0.0;      // (T_{p,x}) restricted to columns sigma <= M
    double z_long_at_zero = 0.0;  // (T_{p,0}) with sum gamma <= 1/lambda
};

/// Diagnostic decomposition behind the sandwich
/// h_p(x) <= c'x + z_short + z_long(0) <= 2 h_p(x); both LPs are built over
/// the fully enumerated scenario set (guard: 2^|U| <= 4096).
ShortLongDecomposition decompose_short_long(const TwoStageProblem& problem, const Vec& x,
                                            const ExplicitDistribution& p, double r,
                                            const ScenarioMetric& metric);

/// z_long alone, for the concavity-in-p checks.
double z_long_at_zero(const TwoStageProblem& problem, const ExplicitDistribution& p, double r,
                      const ScenarioMetric& metric);

}  // namespace drts

#endif
