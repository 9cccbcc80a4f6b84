#ifndef DRTS_LINFTY_HPP
#define DRTS_LINFTY_HPP

#include <cstdint>
#include <vector>

#include "drts/ellipsoid.hpp"
#include "drts/problem.hpp"

namespace drts {

/// Estimate of the free mass P_free = sum_A min{p_A, r}: the part of the
/// central distribution the adversary can relocate under the L-infinity ball.
struct FreeMassEstimate {
    double p_free_hat = 1.0;  // in [P_free, min{(1+eps')P_free, 1}] whp
    double r = 0.0;
    std::vector<Scenario> freq;       // A-hat-freq: scenarios with p-hat >= r/2
    std::vector<double> freq_prob;    // refined estimates for freq scenarios
    double delta = 0.0;
    std::uint64_t seed = 0;
};

/// Two Chernoff rounds: N1 = ceil((2/r^2) ln(2/(delta r))) samples identify
/// A-hat-freq = {A : p-hat_A >= r/2}; N2 = ceil(8 F^2/(eps' r)^2 ln(2F/delta))
/// samples (F = |A-hat-freq|) refine, then
/// P-hat-free = min{Q_free + eps' r / 2, 1}.
FreeMassEstimate estimate_free_mass(const CentralDistribution& center, double r, double eps_prime,
                                    double delta, std::uint64_t seed);

/// Exact free mass of an explicit center, packaged as a (valid) estimate.
FreeMassEstimate exact_free_mass(const ExplicitDistribution& center, double r);

/// The k costliest scenarios in non-increasing g(x,.) order, computed by
/// maximal-proper-subset enumeration (valid for monotone g, A = 2^U).
std::vector<Scenario> good_k_sequence(const TwoStageProblem& problem, const Vec& x, int k_inf);

struct KPolytopeSolution {
    std::vector<Scenario> scenarios;
    std::vector<double> weight;  // r, r, ..., min{r, P-hat-free - (k-1)r}
    double value = 0.0;
};

/// Greedy fractional-knapsack fill of K = {q >= 0 : q_A <= r, sum q <= P-hat};
/// optimal when the sequence is a good k_inf-sequence.
KPolytopeSolution optimal_q(double p_free_hat, double r,
                            const std::vector<std::pair<Scenario, double>>& sequence);

/// Proxy h_prox(x) = c'x + E_p[g(x,A)] + max_{q in K} sum q_A g(x,A).
/// Explicit centers use the exact expectation; black-box centers sample
/// `sample_budget` draws derived from `seed`.
double proxy_value(const TwoStageProblem& problem, const Vec& x, const CentralDistribution& center,
                   const FreeMassEstimate& estimate, int sample_budget, std::uint64_t seed);

/// omega-subgradient of the proxy: c + d-hat + sum q*_A d^{x,A}, where d-hat
/// estimates E_p[d^{x,A}] from ceil((2 lambda^2/omega^2) ln(2m/delta)) draws
/// and is shifted by -omega c / 2. Explicit centers use the exact expectation
/// (the shift still applies, keeping the one-sided bracket).
Vec proxy_subgradient(const TwoStageProblem& problem, const Vec& x,
                      const CentralDistribution& center, const FreeMassEstimate& estimate,
                      double omega, double delta, std::uint64_t seed);

struct LinftyResult {
    Vec x_bar;
    double proxy = 0.0;  // proxy value at x_bar
    bool null_instance = false;
    FreeMassEstimate estimate;
};

/// End-to-end L-infinity solver: null check (g(0,U) = 0 -> x = 0), free-mass
/// estimation, then minimize_convex on the proxy with lb = r g(0,U),
/// kappa = eps*lb, K-tilde = (2 lambda + 1)||c||. Guarantees
/// h_p(x_bar) <= (2 + O(eps)) min_P h_p with probability >= 1 - delta.
LinftyResult solve_linfty(const TwoStageProblem& problem, const CentralDistribution& center,
                          double r, double eps, double delta, std::uint64_t seed);

}  // namespace drts

#endif
