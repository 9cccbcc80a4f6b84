#include "drts/linfty.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace drts {

namespace {

int scenario_count(const TwoStageProblem& problem) {
    const int n = problem.ground_size();
    if (n > 12) throw TooLarge("L-infinity machinery limited to 4096 scenarios");
    return 1 << n;
}

}  // namespace

FreeMassEstimate estimate_free_mass(const CentralDistribution& center, double r, double eps_prime,
                                    double delta, std::uint64_t seed) {
    if (!(r > 0.0 && r <= 1.0)) throw ParseError("L-infinity radius must lie in (0,1]");
    FreeMassEstimate out;
    out.r = r;
    out.delta = delta;
    out.seed = seed;

    // Round 1: find the frequent scenarios.
    int n1 = static_cast<int>(std::ceil(2.0 / (r * r) * std::log(2.0 / (delta * r))));
    ExplicitDistribution rough = empirical_estimate(center, n1, split_seed(seed, 1));
    for (std::size_t i = 0; i < rough.support.size(); ++i)
        if (rough.prob[i] >= r / 2.0) out.freq.push_back(rough.support[i]);

    // Round 2: refine, with per-scenario accuracy eps'*r/(4F).
    double f = std::max<double>(1.0, static_cast<double>(out.freq.size()));
    double acc = eps_prime * r / (4.0 * f);
    int n2 = static_cast<int>(std::ceil(std::log(2.0 * f / delta) / (2.0 * acc * acc)));
    n2 = std::min(n2, 4'000'000);
    ExplicitDistribution fine = empirical_estimate(center, n2, split_seed(seed, 2));

    double q_free = 0.0;
    for (Scenario a : out.freq) {
        double pa = fine.probability_of(a);
        out.freq_prob.push_back(pa);
        q_free += std::min(pa, r);
    }
    for (std::size_t i = 0; i < fine.support.size(); ++i) {
        bool is_freq = false;
        for (Scenario a : out.freq) is_freq |= a == fine.support[i];
        if (!is_freq) q_free += fine.prob[i];
    }
    out.p_free_hat = std::min(q_free + eps_prime * r / 2.0, 1.0);
    return out;
}

FreeMassEstimate exact_free_mass(const ExplicitDistribution& center, double r) {
    center.validate();
    FreeMassEstimate out;
    out.r = r;
    double free = 0.0;
    for (std::size_t i = 0; i < center.support.size(); ++i) {
        free += std::min(center.prob[i], r);
        if (center.prob[i] >= r / 2.0) {
            out.freq.push_back(center.support[i]);
            out.freq_prob.push_back(center.prob[i]);
        }
    }
    out.p_free_hat = std::min(free, 1.0);
    return out;
}

std::vector<Scenario> good_k_sequence(const TwoStageProblem& problem, const Vec& x, int k_inf) {
    if (!problem.monotone()) throw NotMonotone();
    const int n = problem.ground_size();
    k_inf = std::min(k_inf, scenario_count(problem));
    std::vector<Scenario> out;
    if (k_inf <= 0) return out;
    out.push_back(Scenario::full(n));
    std::set<std::uint64_t> chosen{out[0].mask};
    while (static_cast<int>(out.size()) < k_inf) {
        // The next-costliest scenario is a maximal proper subset of a chosen one.
        bool found = false;
        Scenario best;
        double best_g = 0.0;
        for (Scenario a : out)
            for (int e : a.members()) {
                Scenario cand = a.without(e);
                if (chosen.count(cand.mask)) continue;
                double v = problem.g(x, cand);
                if (!found || v > best_g + 1e-12 ||
                    (v > best_g - 1e-12 && cand.mask < best.mask)) {
                    best = cand;
                    best_g = v;
                    found = true;
                }
            }
        if (!found) break;  // all 2^n scenarios listed
        out.push_back(best);
        chosen.insert(best.mask);
    }
    return out;
}

KPolytopeSolution optimal_q(double p_free_hat, double r,
                            const std::vector<std::pair<Scenario, double>>& sequence) {
    KPolytopeSolution out;
    double remaining = p_free_hat;
    for (const auto& [scenario, g] : sequence) {
        if (remaining <= 1e-15) break;
        double w = std::min(r, remaining);
        out.scenarios.push_back(scenario);
        out.weight.push_back(w);
        out.value += w * g;
        remaining -= w;
    }
    return out;
}

namespace {

KPolytopeSolution k_max(const TwoStageProblem& problem, const Vec& x,
                        const FreeMassEstimate& estimate) {
    int k_inf = static_cast<int>(std::ceil(estimate.p_free_hat / estimate.r - 1e-12));
    auto seq = good_k_sequence(problem, x, std::max(1, k_inf));
    std::vector<std::pair<Scenario, double>> with_g;
    for (Scenario a : seq) with_g.emplace_back(a, problem.g(x, a));
    return optimal_q(estimate.p_free_hat, estimate.r, with_g);
}

double expectation_term(const TwoStageProblem& problem, const Vec& x,
                        const CentralDistribution& center, int sample_budget, std::uint64_t seed) {
    if (center.has_explicit()) {
        const auto& p = center.explicit_support();
        double e = 0.0;
        for (std::size_t i = 0; i < p.support.size(); ++i)
            e += p.prob[i] * problem.g(x, p.support[i]);
        return e;
    }
    ExplicitDistribution p = empirical_estimate(center, sample_budget, seed);
    double e = 0.0;
    for (std::size_t i = 0; i < p.support.size(); ++i)
        e += p.prob[i] * problem.g(x, p.support[i]);
    return e;
}

}  // namespace

double proxy_value(const TwoStageProblem& problem, const Vec& x, const CentralDistribution& center,
                   const FreeMassEstimate& estimate, int sample_budget, std::uint64_t seed) {
    return problem.first_stage_cost().dot(x) +
           expectation_term(problem, x, center, sample_budget, seed) +
           k_max(problem, x, estimate).value;
}

Vec proxy_subgradient(const TwoStageProblem& problem, const Vec& x,
                      const CentralDistribution& center, const FreeMassEstimate& estimate,
                      double omega, double delta, std::uint64_t seed) {
    const Vec& c = problem.first_stage_cost();
    Vec d_hat = Vec::Zero(problem.dim());
    if (center.has_explicit()) {
        const auto& p = center.explicit_support();
        for (std::size_t i = 0; i < p.support.size(); ++i)
            d_hat += p.prob[i] * problem.scenario_subgradient(x, p.support[i]);
    } else {
        double lambda = problem.inflation();
        double nd = std::ceil(2.0 * lambda * lambda / (omega * omega) *
                              std::log(2.0 * problem.dim() / delta));
        if (!(nd < 1e6)) throw TooLarge("subgradient sample count");
        int n = std::max(1, static_cast<int>(nd));
        ExplicitDistribution p = empirical_estimate(center, n, seed);
        for (std::size_t i = 0; i < p.support.size(); ++i)
            d_hat += p.prob[i] * problem.scenario_subgradient(x, p.support[i]);
    }
    d_hat -= (omega / 2.0) * c;

    Vec out = c + d_hat;
    auto q = k_max(problem, x, estimate);
    for (std::size_t i = 0; i < q.scenarios.size(); ++i)
        out += q.weight[i] * problem.scenario_subgradient(x, q.scenarios[i]);
    return out;
}

LinftyResult solve_linfty(const TwoStageProblem& problem, const CentralDistribution& center,
                          double r, double eps, double delta, std::uint64_t seed) {
    const int m = problem.dim();
    const Vec& c = problem.first_stage_cost();
    Vec zero = Vec::Zero(m);
    double g0u = problem.g(zero, Scenario::full(problem.ground_size()));

    LinftyResult out;
    if (g0u <= 1e-12) {
        out.null_instance = true;
        out.x_bar = zero;
        return out;
    }

    if (center.has_explicit())
        out.estimate = exact_free_mass(center.explicit_support(), std::min(r, 1.0));
    else
        out.estimate = estimate_free_mass(center, std::min(r, 1.0), eps, delta, split_seed(seed, 0));

    ConvexMinimizeParams params;
    params.m = m;
    params.R = problem.bound_R();
    params.V = problem.bound_V();
    params.lipschitz = (2.0 * problem.inflation() + 1.0) * c.norm();
    params.eps = eps;
    params.kappa = eps * std::min(r, 1.0) * g0u;
    params.delta = delta;
    double omega = convsolve_omega(params);

    int counter = 0;
    ValueSubgradientOracle oracle = [&](const Vec& x) {
        std::uint64_t s = split_seed(seed, 1 + counter++);
        double value = proxy_value(problem, x, center, out.estimate, 512, s);
        Vec sub = proxy_subgradient(problem, x, center, out.estimate, omega, delta, split_seed(s, 1));
        return std::make_pair(value, sub);
    };
    out.x_bar = minimize_convex(oracle, params);
    out.proxy = proxy_value(problem, out.x_bar, center, out.estimate, 512, split_seed(seed, 0));
    return out;
}

}  // namespace drts
