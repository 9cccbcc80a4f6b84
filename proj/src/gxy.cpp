#include "drts/gxy.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "drts/problems.hpp"

namespace drts {

namespace {

bool better(double value, Scenario s, double best_value, Scenario best, double tol) {
    if (value > best_value + tol) return true;
    if (value < best_value - tol) return false;
    return s.mask < best.mask;
}

}  // namespace

GxyResult gxy_discrete(const TwoStageProblem& problem, const Vec& x, double y, Scenario a,
                       const MaxminOracleFn& maxmin_oracle, double beta) {
    GxyResult out;
    out.beta1 = beta;
    out.beta2 = 1.0;
    out.scenario = a;
    out.value = problem.g(x, a);
    Scenario abar = maxmin_oracle(x);
    double moved = problem.g(x, abar) - y;
    if (better(moved, abar, out.value, out.scenario, 1e-12)) {
        out.scenario = abar;
        out.value = moved;
    }
    return out;
}

GxyResult gxy_enumerated(const TwoStageProblem& problem, const Vec& x, double y, Scenario a,
                         const ScenarioMetric& metric, const ConstrainedOracleFn& oracle,
                         double beta, double eps) {
    std::vector<double> grid;
    double smax = metric.sigma_max(problem.ground_size());
    if (eps <= 0.0) {
        grid = metric.distinct_values(problem.ground_size());
    } else {
        grid.push_back(0.0);
        double smin = std::numeric_limits<double>::infinity();
        for (double v : metric.distinct_values(problem.ground_size()))
            if (v > 0) smin = std::min(smin, v);
        for (double mu = smin; mu < smax * (1.0 + eps); mu *= 1.0 + eps)
            grid.push_back(std::min(mu, smax));
    }

    GxyResult out;
    out.beta1 = beta;
    out.beta2 = eps <= 0.0 ? 1.0 : 1.0 + eps;
    out.scenario = a;
    out.value = problem.g(x, a);  // sigma(a,a) = 0
    for (double mu : grid) {
        Scenario cand = oracle(x, a, mu);
        double v = problem.g(x, cand) - y * metric(a, cand);
        if (better(v, cand, out.value, out.scenario, 1e-12)) {
            out.scenario = cand;
            out.value = v;
        }
    }
    return out;
}

std::vector<Scenario> collapse(const TwoStageProblem& problem, Scenario a,
                               const ScenarioMetric& metric) {
    if (!problem.monotone()) throw NotMonotone();
    const int n = problem.ground_size();
    Scenario full = Scenario::full(n);
    if (metric.kind() == MetricKind::Discrete) {
        if (a == full) return {full};
        return {a, full};
    }
    // AsymInf: for each distance threshold, the maximal scenario within it.
    Scenario base = a;
    if (metric.anchor()) base = base.with(*metric.anchor());
    if (base.empty()) throw AnchorMissing();
    const Mat& d = metric.base_distances();
    std::vector<Scenario> out;
    for (double mu : metric.distinct_values(n)) {
        Scenario s;
        for (int j = 0; j < n; ++j) {
            double nearest = std::numeric_limits<double>::infinity();
            for (int i : base.members()) nearest = std::min(nearest, d(i, j));
            if (nearest <= mu + 1e-12) s = s.with(j);
        }
        if (out.empty() || out.back() != s) out.push_back(s);
    }
    return out;
}

ApproxTransportResult approx_transport(const TwoStageProblem& problem, const Vec& x,
                                       const ExplicitDistribution& p_hat, double r,
                                       const ScenarioMetric& metric, const GxyOracleFn& oracle) {
    p_hat.validate();
    const int rows = static_cast<int>(p_hat.support.size());
    double scale = problem.first_stage_cost().sum();
    for (Scenario s : p_hat.support) scale = std::max(scale, problem.g(x, s));
    const double e = std::ldexp(scale + 1.0, -40);

    TransportLpSpec spec;
    spec.row_mass = p_hat.prob;
    spec.budget = r;
    std::map<std::pair<int, std::uint64_t>, bool> seen;
    for (int i = 0; i < rows; ++i) {
        spec.columns.push_back({i, p_hat.support[i], problem.g(x, p_hat.support[i]), 0.0});
        seen[{i, p_hat.support[i].mask}] = true;
    }

    ApproxTransportResult out;
    TransportSolution sol;
    for (int iter = 0; iter < 500; ++iter) {
        sol = solve_transport_restricted(spec);
        bool improved = false;
        for (int i = 0; i < rows; ++i) {
            Scenario ai = p_hat.support[i];
            GxyResult res = oracle(x, sol.budget_dual, ai);
            ++out.oracle_calls;
            out.beta1 = std::max(out.beta1, res.beta1);
            out.beta2 = std::max(out.beta2, res.beta2);
            if (res.value < problem.g(x, ai) / res.beta1 - 1e-7 * (scale + 1.0))
                throw OracleContractViolation("gxy result below its own self-guarantee");
            if (res.value > sol.row_dual[i] + e) {
                auto key = std::make_pair(i, res.scenario.mask);
                if (!seen[key]) {
                    seen[key] = true;
                    spec.columns.push_back({i, res.scenario, problem.g(x, res.scenario),
                                            metric(ai, res.scenario)});
                    improved = true;
                }
            }
        }
        if (!improved) break;
    }
    out.transport = sol;
    return out;
}

Scenario kmaxmin_bruteforce(const TwoStageProblem& problem, const Vec& x, int k) {
    const int n = problem.ground_size();
    if (n > 20) throw TooLarge("k-max-min enumeration limited to 20 ground elements");
    Scenario best;
    double best_g = 0.0;
    for (std::uint64_t m = 0; m < (1ULL << n); ++m) {
        Scenario s(m);
        if (s.size() > k) continue;
        double v = problem.g(x, s);
        if (v > best_g + 1e-12) {
            best = s;
            best_g = v;
        }
    }
    return best;
}

namespace {

// Ghost opening time: the t solving sum_j max{0, t - d_ij} = opening cost.
double ghost_time(const std::vector<double>& dists, double cost) {
    if (cost <= 0.0) return 0.0;
    std::vector<double> d = dists;
    std::sort(d.begin(), d.end());
    double paid = 0.0;
    for (std::size_t k = 0; k < d.size(); ++k) {
        // On [d[k], next), k+1 balls contribute.
        double next = k + 1 < d.size() ? d[k + 1] : std::numeric_limits<double>::infinity();
        double segment = (k + 1) * (next - d[k]);
        if (paid + segment >= cost) return d[k] + (cost - paid) / (k + 1);
        paid += segment;
    }
    return d.empty() ? std::numeric_limits<double>::infinity() : d.back();
}

}  // namespace

CostShareTable fl_cost_shares(const FacilityLocationProblem& fl, const Vec& x, Scenario clients) {
    CostShareTable table;
    auto members = clients.members();
    if (members.empty()) return table;
    Vec open_cost = fl.effective_open_cost(x);
    std::vector<double> t(fl.n_facilities());
    for (int i = 0; i < fl.n_facilities(); ++i) {
        std::vector<double> dists;
        for (int j : members) dists.push_back(fl.dist(i, j));
        t[i] = ghost_time(dists, open_cost[i]);
    }
    for (int j : members) {
        double xi = std::numeric_limits<double>::infinity();
        for (int i = 0; i < fl.n_facilities(); ++i)
            xi = std::min(xi, std::max(t[i], fl.dist(i, j)));
        table.clients.push_back(j);
        table.share.push_back(xi);
        table.total += xi;
    }
    return table;
}

Scenario kmaxmin_fl_greedy(const FacilityLocationProblem& fl, const Vec& x, int k) {
    k = std::min(k, fl.n_clients());
    Scenario j_set;
    for (int round = 0; round < k; ++round) {
        int pick = -1;
        double pick_share = -1.0;
        for (int j = 0; j < fl.n_clients(); ++j) {
            if (j_set.contains(j)) continue;
            double share = fl_cost_shares(fl, x, j_set.with(j)).share_of(j);
            if (share > pick_share + 1e-12) {
                pick = j;
                pick_share = share;
            }
        }
        if (pick < 0) break;
        j_set = j_set.with(pick);
    }
    return j_set;
}

Scenario kmaxmin_cover_heuristic(const TwoStageProblem& problem, const Vec& x, int k) {
    const int n = problem.ground_size();
    if (k >= n) return Scenario::full(n);
    Scenario a;
    for (int round = 0; round < k; ++round) {
        int pick = -1;
        double pick_g = -1.0;
        for (int e = 0; e < n; ++e) {
            if (a.contains(e)) continue;
            double v = problem.g(x, a.with(e));
            if (v > pick_g + 1e-12) {
                pick = e;
                pick_g = v;
            }
        }
        a = a.with(pick);
    }
    return a;
}

}  // namespace drts
