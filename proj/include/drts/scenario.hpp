#ifndef DRTS_SCENARIO_HPP
#define DRTS_SCENARIO_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "drts/common.hpp"

namespace drts {

/// A scenario is a subset of a ground set of at most 64 elements, stored as a
/// bitmask. Element i corresponds to bit i. Scenarios compare by mask value,
/// which gives the lexicographic-by-bitset tie-break used throughout.
struct Scenario {
    std::uint64_t mask = 0;

    Scenario() = default;
    explicit Scenario(std::uint64_t m) : mask(m) {}

    static Scenario full(int ground_size) {
        return Scenario(ground_size >= 64 ? ~0ULL : ((1ULL << ground_size) - 1));
    }

    bool contains(int element) const { return (mask >> element) & 1ULL; }
    bool empty() const { return mask == 0; }
    int size() const { return __builtin_popcountll(mask); }
    bool subset_of(Scenario other) const { return (mask & ~other.mask) == 0; }

    Scenario with(int element) const { return Scenario(mask | (1ULL << element)); }
    Scenario without(int element) const { return Scenario(mask & ~(1ULL << element)); }
    Scenario minus(Scenario other) const { return Scenario(mask & ~other.mask); }
    Scenario united(Scenario other) const { return Scenario(mask | other.mask); }

    std::vector<int> members() const {
        std::vector<int> out;
        for (std::uint64_t m = mask; m != 0; m &= m - 1)
            out.push_back(__builtin_ctzll(m));
        return out;
    }

    auto operator<=>(const Scenario&) const = default;
};

enum class MetricKind { Discrete, AsymInf };

/// Scenario metric sigma. For AsymInf, `base` is a nonnegative symmetric matrix
/// over ground elements satisfying the triangle inequality, and an optional
/// anchor element is treated as implicitly present in every scenario.
class ScenarioMetric {
  public:
    static ScenarioMetric discrete() { return ScenarioMetric(); }

    static ScenarioMetric asym_inf(Mat base_distances, std::optional<int> anchor = std::nullopt);

    MetricKind kind() const { return kind_; }
    std::optional<int> anchor() const { return anchor_; }
    const Mat& base_distances() const { return base_; }

    /// sigma(A, A'). Throws AnchorMissing for AsymInf from the empty scenario
    /// to a nonempty one when no anchor is declared.
    double operator()(Scenario a, Scenario b) const;

    /// All distinct sigma values that can occur between scenarios over this
    /// ground set (always includes 0), sorted ascending.
    std::vector<double> distinct_values(int ground_size) const;

    /// max over ground-element pairs (1 for Discrete).
    double sigma_max(int ground_size) const;

  private:
    ScenarioMetric() = default;
    MetricKind kind_ = MetricKind::Discrete;
    Mat base_;
    std::optional<int> anchor_;
};

/// A distribution over scenarios with explicit support. Empirical estimates
/// carry exact counts so probabilities are the rationals count/N.
struct ExplicitDistribution {
    std::vector<Scenario> support;
    std::vector<double> prob;

    double probability_of(Scenario a) const {
        for (std::size_t i = 0; i < support.size(); ++i)
            if (support[i] == a) return prob[i];
        return 0.0;
    }

    void validate() const;
};

/// Central distribution: either an explicit support or a black-box sampler.
/// Sampler draws are pure functions of (seed, draw index).
class CentralDistribution {
  public:
    using Sampler = std::function<Scenario(std::uint64_t seed, std::uint64_t index)>;

    static CentralDistribution from_explicit(ExplicitDistribution d);
    static CentralDistribution from_sampler(Sampler s);

    bool has_explicit() const { return explicit_.has_value(); }
    const ExplicitDistribution& explicit_support() const { return *explicit_; }

    Scenario sample(std::uint64_t seed, std::uint64_t index) const;

  private:
    std::optional<ExplicitDistribution> explicit_;
    Sampler sampler_;
};

enum class BallMetric { Wasserstein, Linf };

struct AmbiguityBall {
    CentralDistribution center;
    double radius = 0.0;
    BallMetric metric = BallMetric::Wasserstein;
    ScenarioMetric scenario_metric = ScenarioMetric::discrete();

    static AmbiguityBall wasserstein(CentralDistribution c, double r, ScenarioMetric sm) {
        AmbiguityBall b{std::move(c), r, BallMetric::Wasserstein, std::move(sm)};
        return b;
    }
    static AmbiguityBall linf(CentralDistribution c, double r) {
        // L-infinity distance between distributions never exceeds 1.
        AmbiguityBall b{std::move(c), std::min(r, 1.0), BallMetric::Linf, ScenarioMetric::discrete()};
        return b;
    }
};

double scenario_distance(const ScenarioMetric& metric, Scenario a, Scenario b);

/// Minimum sigma-cost of a transportation plan moving p onto q (equality
/// marginals), solved as an LP over the product of the two supports.
double wasserstein_distance(const ExplicitDistribution& p, const ExplicitDistribution& q,
                            const ScenarioMetric& metric);

/// Empirical estimate of `center` from N draws; probabilities are count/N.
ExplicitDistribution empirical_estimate(const CentralDistribution& center, int n_samples,
                                        std::uint64_t seed);

}  // namespace drts

#endif
