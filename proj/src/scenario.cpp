#include "drts/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "drts/lp.hpp"

namespace drts {

ScenarioMetric ScenarioMetric::asym_inf(Mat base_distances, std::optional<int> anchor) {
    if (base_distances.rows() != base_distances.cols())
        throw Error("asym-inf base distance matrix must be square");
    for (int i = 0; i < base_distances.rows(); ++i)
        for (int j = 0; j < base_distances.cols(); ++j) {
            if (base_distances(i, j) < 0 ||
                std::abs(base_distances(i, j) - base_distances(j, i)) > 1e-12)
                throw Error("asym-inf base distances must be nonnegative and symmetric");
        }
    ScenarioMetric m;
    m.kind_ = MetricKind::AsymInf;
    m.base_ = std::move(base_distances);
    m.anchor_ = anchor;
    return m;
}

double ScenarioMetric::operator()(Scenario a, Scenario b) const {
    if (kind_ == MetricKind::Discrete) return a == b ? 0.0 : 1.0;

    if (anchor_) {
        a = a.with(*anchor_);
        b = b.with(*anchor_);
    }
    if (b.empty()) return 0.0;
    if (a.empty()) throw AnchorMissing();
    double worst = 0.0;
    for (int jp : b.members()) {
        double nearest = std::numeric_limits<double>::infinity();
        for (int j : a.members()) nearest = std::min(nearest, base_(j, jp));
        worst = std::max(worst, nearest);
    }
    return worst;
}

std::vector<double> ScenarioMetric::distinct_values(int ground_size) const {
    std::vector<double> vals{0.0};
    if (kind_ == MetricKind::Discrete) {
        vals.push_back(1.0);
    } else {
        for (int i = 0; i < ground_size; ++i)
            for (int j = 0; j < ground_size; ++j) vals.push_back(base_(i, j));
    }
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end(),
                           [](double x, double y) { return std::abs(x - y) < 1e-12; }),
               vals.end());
    return vals;
}

double ScenarioMetric::sigma_max(int ground_size) const {
    if (kind_ == MetricKind::Discrete) return 1.0;
    double mx = 0.0;
    for (int i = 0; i < ground_size; ++i)
        for (int j = 0; j < ground_size; ++j) mx = std::max(mx, base_(i, j));
    return mx;
}

void ExplicitDistribution::validate() const {
    if (support.size() != prob.size())
        throw InfeasibleMarginals("support/probability size mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < support.size(); ++i) {
        if (prob[i] < 0.0) throw InfeasibleMarginals("negative probability");
        for (std::size_t j = i + 1; j < support.size(); ++j)
            if (support[i] == support[j])
                throw InfeasibleMarginals("duplicate scenario in support");
        sum += prob[i];
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw InfeasibleMarginals("probabilities do not sum to 1");
}

CentralDistribution CentralDistribution::from_explicit(ExplicitDistribution d) {
    d.validate();
    CentralDistribution c;
    c.explicit_ = std::move(d);
    return c;
}

CentralDistribution CentralDistribution::from_sampler(Sampler s) {
    CentralDistribution c;
    c.sampler_ = std::move(s);
    return c;
}

Scenario CentralDistribution::sample(std::uint64_t seed, std::uint64_t index) const {
    if (explicit_) {
        // Inverse CDF on a uniform in [0,1) derived from (seed, index).
        double u = (split_seed(seed, index) >> 11) * 0x1.0p-53;
        double acc = 0.0;
        for (std::size_t i = 0; i < explicit_->support.size(); ++i) {
            acc += explicit_->prob[i];
            if (u < acc) return explicit_->support[i];
        }
        return explicit_->support.back();
    }
    return sampler_(seed, index);
}

double scenario_distance(const ScenarioMetric& metric, Scenario a, Scenario b) {
    return metric(a, b);
}

double wasserstein_distance(const ExplicitDistribution& p, const ExplicitDistribution& q,
                            const ScenarioMetric& metric) {
    p.validate();
    q.validate();
    const int np = static_cast<int>(p.support.size());
    const int nq = static_cast<int>(q.support.size());

    LinearProgram lp;
    lp.sense = Sense::Min;
    for (int i = 0; i < np; ++i)
        for (int j = 0; j < nq; ++j)
            lp.add_variable(metric(p.support[i], q.support[j]));
    for (int i = 0; i < np; ++i) {
        LpRow row;
        for (int j = 0; j < nq; ++j) row.coeffs.push_back({i * nq + j, 1.0});
        row.rel = Relation::Eq;
        row.rhs = p.prob[i];
        lp.add_row(std::move(row));
    }
    for (int j = 0; j < nq; ++j) {
        LpRow col;
        for (int i = 0; i < np; ++i) col.coeffs.push_back({i * nq + j, 1.0});
        col.rel = Relation::Eq;
        col.rhs = q.prob[j];
        lp.add_row(std::move(col));
    }
    LpSolution s = solve_lp(lp);
    if (s.status != LpStatus::Optimal)
        throw InfeasibleMarginals("transport marginals admit no feasible plan");
    return std::max(0.0, s.value);
}

ExplicitDistribution empirical_estimate(const CentralDistribution& center, int n_samples,
                                        std::uint64_t seed) {
    if (n_samples < 1) throw Error("empirical_estimate needs at least one sample");
    std::map<Scenario, int> counts;
    for (int i = 0; i < n_samples; ++i) counts[center.sample(seed, static_cast<std::uint64_t>(i))]++;
    ExplicitDistribution out;
    for (const auto& [sc, cnt] : counts) {
        out.support.push_back(sc);
        out.prob.push_back(static_cast<double>(cnt) / n_samples);
    }
    return out;
}

}  // namespace drts
