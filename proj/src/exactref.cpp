#include "drts/exactref.hpp"

#include <algorithm>

namespace drts {

EnumeratedUniverse::EnumeratedUniverse(int ground_size, std::optional<int> k_bound)
    : ground_size_(ground_size) {
    if (ground_size < 0 || ground_size > 12)
        throw TooLarge("enumerated universe limited to 12 ground elements");
    for (std::uint64_t m = 0; m < (1ULL << ground_size); ++m) {
        Scenario s(m);
        if (!k_bound || s.size() <= *k_bound) scenarios_.push_back(s);
    }
    if (scenarios_.size() > 4096) throw TooLarge("scenario enumeration guard exceeded");
}

InnerMaxResult exact_inner_max(const TwoStageProblem& problem, const Vec& x,
                               const AmbiguityBall& ball, const EnumeratedUniverse& universe) {
    if (!ball.center.has_explicit()) throw Error("exact_inner_max needs an explicit ball center");
    const auto& p = ball.center.explicit_support();
    InnerMaxResult out;
    const double cx = problem.first_stage_cost().dot(x);

    if (ball.metric == BallMetric::Wasserstein) {
        TransportLpSpec spec;
        spec.row_mass = p.prob;
        spec.budget = ball.radius;
        for (std::size_t i = 0; i < p.support.size(); ++i)
            for (Scenario target : universe.scenarios())
                spec.columns.push_back({static_cast<int>(i), target, problem.g(x, target),
                                        ball.scenario_metric(p.support[i], target)});
        TransportSolution t = solve_transport_restricted(spec);
        out.expectation = t.value;
        out.plan = t.plan;
    } else {
        // max sum q_A g(x,A)  s.t.  |q_A - p_A| <= r, q >= 0, sum q = 1.
        LinearProgram lp;
        lp.sense = Sense::Max;
        LpRow total;
        const auto& scen = universe.scenarios();
        for (std::size_t i = 0; i < scen.size(); ++i) {
            double pa = p.probability_of(scen[i]);
            int var = lp.add_variable(problem.g(x, scen[i]), pa + ball.radius);
            total.coeffs.push_back({var, 1.0});
            if (pa - ball.radius > 0)
                lp.add_row({{{var, 1.0}}, Relation::Ge, pa - ball.radius});
        }
        total.rel = Relation::Eq;
        total.rhs = 1.0;
        lp.add_row(std::move(total));
        LpSolution s = solve_lp(lp);
        if (s.status != LpStatus::Optimal) throw NumericalFailure("L-inf inner LP failed");
        out.expectation = s.value;
        for (std::size_t i = 0; i < scen.size(); ++i)
            if (s.primal[i] > 1e-12) out.q.push_back({scen[i], s.primal[i]});
    }
    out.value = cx + out.expectation;
    return out;
}

DiscreteOptimum exact_discrete_optimum(const TwoStageProblem& problem, const AmbiguityBall& ball,
                                       const EnumeratedUniverse& universe) {
    const int m = problem.dim();
    if (m > 16) throw TooLarge("first-stage enumeration limited to 16 variables");
    DiscreteOptimum best;
    best.value = std::numeric_limits<double>::infinity();
    for (std::uint64_t bits = 0; bits < (1ULL << m); ++bits) {
        Vec x = Vec::Zero(m);
        for (int j = 0; j < m; ++j)
            if (bits >> j & 1) x[j] = 1.0;
        double v = exact_inner_max(problem, x, ball, universe).value;
        if (v < best.value - 1e-12) {
            best.value = v;
            best.x = x;
        }
    }
    return best;
}

GxyResult exact_gxy(const TwoStageProblem& problem, const Vec& x, double y, Scenario a,
                    const ScenarioMetric& metric, const EnumeratedUniverse& universe) {
    GxyResult best;
    bool first = true;
    for (Scenario ap : universe.scenarios()) {
        double v = problem.g(x, ap) - y * metric(a, ap);
        if (first || v > best.value + 1e-12) {
            best.scenario = ap;
            best.value = v;
            first = false;
        }
    }
    return best;
}

}  // namespace drts
