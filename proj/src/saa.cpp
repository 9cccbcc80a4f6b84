#include "drts/saa.hpp"

#include <cmath>

namespace drts {

int sample_count(double eps, double delta, double lambda, double log_x,
                 double log_tau_over_kappa, double c) {
    double ratio = lambda / eps;
    double n = std::ceil(c * ratio * ratio * (log_x + log_tau_over_kappa + std::log(1.0 / delta)));
    return std::max(1, static_cast<int>(n));
}

int SaaConfig::effective_replicates() const {
    if (replicates > 0) return replicates;
    return std::max(1, static_cast<int>(std::ceil((2.0 / eps) * std::log(1.0 / delta))));
}

SaaReport run_saa(const CentralDistribution& center, const SaaConfig& config,
                  const SaaSolverFn& solver,
                  const std::optional<std::vector<std::uint64_t>>& seeds) {
    const int k = seeds ? static_cast<int>(seeds->size()) : config.effective_replicates();
    SaaReport report;
    for (int i = 0; i < k; ++i) {
        std::uint64_t seed_i = seeds ? (*seeds)[i] : split_seed(config.seed, i);
        ExplicitDistribution p_hat = empirical_estimate(center, config.n_samples, seed_i);
        auto [x, f] = solver(p_hat);
        report.replicates.push_back({x, f, seed_i});
        if (i == 0 || f < report.f_hat - 1e-15) {
            report.selected = i;
            report.x_hat = x;
            report.f_hat = f;
        }
    }
    return report;
}

namespace {

std::vector<Scenario> enumerate_scenarios(const TwoStageProblem& problem) {
    const int n = problem.ground_size();
    if (n > 12) throw TooLarge("short/long decomposition limited to 4096 scenarios");
    std::vector<Scenario> out;
    for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) out.emplace_back(mask);
    return out;
}

}  // namespace

double z_long_at_zero(const TwoStageProblem& problem, const ExplicitDistribution& p, double r,
                      const ScenarioMetric& metric) {
    p.validate();
    auto universe = enumerate_scenarios(problem);
    const Vec zero = Vec::Zero(problem.dim());
    const double lambda = problem.inflation();

    LinearProgram lp;
    lp.sense = Sense::Max;
    LpRow budget{{}, Relation::Le, r};
    LpRow total{{}, Relation::Le, 1.0 / lambda};
    std::vector<LpRow> row_caps(p.support.size());
    for (std::size_t i = 0; i < p.support.size(); ++i)
        row_caps[i] = {{}, Relation::Le, p.prob[i]};

    for (std::size_t i = 0; i < p.support.size(); ++i) {
        for (Scenario ap : universe) {
            int var = lp.add_variable(problem.g(zero, ap));
            double sigma = metric(p.support[i], ap);
            row_caps[i].coeffs.emplace_back(var, 1.0);
            if (sigma != 0.0) budget.coeffs.emplace_back(var, sigma);
            total.coeffs.emplace_back(var, 1.0);
        }
    }
    for (auto& row : row_caps) lp.add_row(std::move(row));
    lp.add_row(std::move(budget));
    lp.add_row(std::move(total));

    LpSolution sol = solve_lp(lp);
    if (sol.status != LpStatus::Optimal) throw NumericalFailure("z_long LP did not solve");
    return sol.value;
}

ShortLongDecomposition decompose_short_long(const TwoStageProblem& problem, const Vec& x,
                                            const ExplicitDistribution& p, double r,
                                            const ScenarioMetric& metric) {
    p.validate();
    auto universe = enumerate_scenarios(problem);

    ShortLongDecomposition out;
    out.m_threshold = problem.inflation() * r;

    TransportLpSpec spec;
    spec.row_mass = p.prob;
    spec.budget = r;
    for (int i = 0; i < static_cast<int>(p.support.size()); ++i)
        for (Scenario ap : universe) {
            double sigma = metric(p.support[i], ap);
            if (sigma <= out.m_threshold + 1e-12)
                spec.columns.push_back({i, ap, problem.g(x, ap), sigma});
        }
    out.z_short = solve_transport_restricted(spec).value;
    out.z_long_at_zero = z_long_at_zero(problem, p, r, metric);
    return out;
}

}  // namespace drts
