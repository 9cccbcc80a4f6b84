#include "drts/ellipsoid.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>

#include "drts/problems.hpp"

namespace drts {

EllipsoidState EllipsoidState::ball(int m, double radius) {
    EllipsoidState e;
    e.center = Vec::Zero(m);
    e.shape = Mat::Identity(m, m) * (radius * radius);
    return e;
}

void EllipsoidState::update(const Vec& normal) {
    const int m = static_cast<int>(center.size());
    Vec ma = shape * normal;
    double denom = normal.dot(ma);
    if (!(denom > 0.0) || !std::isfinite(denom))
        throw NumericalFailure("degenerate ellipsoid cut normal");
    Vec b = ma / std::sqrt(denom);
    if (m == 1) {
        // Half-interval: new radius is half, centered on the kept side.
        center -= b / 2.0;
        shape /= 4.0;
    } else {
        center -= b / (m + 1.0);
        double scale = m * m / (m * m - 1.0);
        shape = scale * (shape - (2.0 / (m + 1.0)) * (b * b.transpose()));
        shape = ((shape + shape.transpose()) / 2.0).eval();
    }
    ++iteration;
    Eigen::SelfAdjointEigenSolver<Mat> es(shape);
    double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > 1e14)
        throw NumericalFailure("ellipsoid shape matrix ill-conditioned");
}

double EllipsoidState::volume_factor() const {
    return std::sqrt(shape.determinant());
}

Vec subgradient_from_transport(const TwoStageProblem& problem, const Vec& x,
                               const std::vector<TransportPlanEntry>& plan) {
    Vec d = problem.first_stage_cost();
    for (const auto& entry : plan)
        d += entry.mass * problem.scenario_subgradient(x, entry.target);
    return d;
}

LowerBoundResult lower_bound(const TwoStageProblem& problem, double r, double sigma_max,
                             const GxyOracleFn& oracle) {
    Vec zero = Vec::Zero(problem.dim());
    GxyResult res = oracle(zero, 0.0, Scenario::full(problem.ground_size()));
    LowerBoundResult out;
    if (problem.g(zero, res.scenario) < 1.0 / res.beta1 - 1e-12) {
        out.zero_optimal = true;
        return out;
    }
    out.lb = r / (res.beta1 * sigma_max);
    return out;
}

namespace {

// kappa = eps*lb, floored so the r = 0 case still yields finite iteration
// counts; the additive rho*kappa slack this adds is below test tolerances.
double kappa_from(double eps, double lb) { return eps * std::max(lb, 1e-6); }

// Index of the first box constraint of [0,1]^m violated by x, encoded as a
// feasibility-cut normal, or nullopt if x is inside.
std::optional<Vec> box_violation(const Vec& x) {
    for (int j = 0; j < x.size(); ++j) {
        if (x[j] < -1e-9) {
            Vec a = Vec::Zero(x.size());
            a[j] = -1.0;
            return a;
        }
        if (x[j] > 1.0 + 1e-9) {
            Vec a = Vec::Zero(x.size());
            a[j] = 1.0;
            return a;
        }
    }
    return std::nullopt;
}

// Cut, but report whether the shape matrix is still usable. Long runs of
// near-parallel cuts squeeze the ellipsoid flat; once the condition guard
// trips, further cuts are numerically meaningless and the caller should
// settle for the best iterate recorded so far.
bool update_or_stop(EllipsoidState& ell, const Vec& normal) {
    try {
        ell.update(normal);
        return true;
    } catch (const NumericalFailure&) {
        return false;
    }
}

int iteration_budget(int m, double mu_v_over_2r) {
    double n = std::ceil(2.0 * m * m * std::log(1.0 / mu_v_over_2r));
    if (!(n < 2e5)) throw TooLarge("ellipsoid iteration budget");
    return std::max(1, static_cast<int>(n));
}

}  // namespace

SaaPolyResult solve_saa_poly(const TwoStageProblem& problem, const ExplicitDistribution& p_hat,
                             double r, const ScenarioMetric& metric, const GxyOracleFn& oracle,
                             const LocalRounder& rounder, double eps) {
    const int m = problem.dim();
    const Vec& c = problem.first_stage_cost();
    double sigma_max = metric.sigma_max(problem.ground_size());

    SaaPolyResult out;
    auto lbr = lower_bound(problem, r, sigma_max, oracle);
    if (lbr.zero_optimal) {
        out.zero_optimal = true;
        out.x_tilde = Vec::Zero(m);
        auto t = approx_transport(problem, out.x_tilde, p_hat, r, metric, oracle);
        out.f_tilde = t.transport.value;
        out.beta1 = t.beta1;
        out.beta2 = t.beta2;
        return out;
    }

    double kappa = kappa_from(eps, lbr.lb);
    double kprime = c.norm() + problem.bound_K();
    double R = problem.bound_R(), V = problem.bound_V();
    double mu = std::min(1.0, kappa / (2.0 * kprime * R));
    int N = iteration_budget(m, mu * V / (2.0 * R));

    EllipsoidState ell = EllipsoidState::ball(m, R);
    std::vector<CutRecord> cuts;
    double best_f = std::numeric_limits<double>::infinity();

    for (int i = 0; i <= N; ++i) {
        Vec normal;
        auto box = box_violation(ell.center);
        if (box) {
            normal = *box;
            out.trace.push_back({i, CutKind::Feasibility, 0.0});
        } else {
            // Re-cut with a violated prior objective halfspace if any.
            const CutRecord* stale = nullptr;
            for (const auto& cut : cuts)
                if (cut.normal.dot(ell.center - cut.anchor) > 1e-9) {
                    stale = &cut;
                    break;
                }
            if (stale) {
                normal = stale->normal;
                out.trace.push_back({i, CutKind::Feasibility, 0.0});
            } else {
                Vec x_tilde = rounder(ell.center);
                auto t = approx_transport(problem, x_tilde, p_hat, r, metric, oracle);
                out.beta1 = std::max(out.beta1, t.beta1);
                out.beta2 = std::max(out.beta2, t.beta2);
                double f = c.dot(x_tilde) + t.transport.value;
                normal = subgradient_from_transport(problem, ell.center, t.transport.plan);
                out.trace.push_back({i, CutKind::Objective, f});
                if (f < best_f) {
                    best_f = f;
                    out.x_tilde = x_tilde;
                    out.f_tilde = f;
                }
                if (normal.norm() <= 1e-12 * (1.0 + c.norm())) return out;
                cuts.push_back({CutKind::Objective, normal, ell.center, x_tilde, f});
            }
        }
        if (!update_or_stop(ell, normal)) break;
    }
    return out;
}

namespace {

std::map<std::uint64_t, std::vector<Scenario>> collapsed_lists(const TwoStageProblem& problem,
                                                               const ExplicitDistribution& p_hat,
                                                               const ScenarioMetric& metric) {
    std::map<std::uint64_t, std::vector<Scenario>> phi;
    for (Scenario a : p_hat.support)
        if (!phi.count(a.mask)) phi[a.mask] = collapse(problem, a, metric);
    return phi;
}

}  // namespace

double collapsible_inner_max(const TwoStageProblem& problem, const Vec& x,
                             const ExplicitDistribution& p_hat, double r,
                             const ScenarioMetric& metric) {
    auto phi = collapsed_lists(problem, p_hat, metric);
    TransportLpSpec spec;
    spec.row_mass = p_hat.prob;
    spec.budget = r;
    for (int i = 0; i < static_cast<int>(p_hat.support.size()); ++i) {
        Scenario a = p_hat.support[i];
        for (Scenario ap : phi[a.mask])
            spec.columns.push_back({i, ap, problem.g(x, ap), metric(a, ap)});
    }
    return solve_transport_restricted(spec).value;
}

CollapsibleResult solve_saa_collapsible(const TwoStageProblem& problem,
                                        const ExplicitDistribution& p_hat, double r,
                                        const ScenarioMetric& metric,
                                        const std::optional<LocalRounder>& rounder) {
    p_hat.validate();
    const int m = problem.dim();
    const Vec& c = problem.first_stage_cost();
    auto phi = collapsed_lists(problem, p_hat, metric);

    LinearProgram lp;
    lp.sense = Sense::Min;
    for (int j = 0; j < m; ++j) lp.add_variable(c[j], 1.0);
    int y_var = lp.add_variable(r);
    std::vector<int> theta(p_hat.support.size());
    for (std::size_t i = 0; i < p_hat.support.size(); ++i)
        theta[i] = lp.add_variable(p_hat.prob[i]);

    // One second-stage copy per distinct collapsed scenario.
    std::map<std::uint64_t, std::pair<int, SecondStageLp>> blocks;
    for (const auto& [mask, list] : phi)
        for (Scenario ap : list)
            if (!blocks.count(ap.mask)) {
                SecondStageLp ss = problem.second_stage(ap);
                int base = lp.num_vars();
                for (int t = 0; t < ss.lp.num_vars(); ++t) lp.add_variable(0.0, ss.lp.upper[t]);
                for (int row = 0; row < static_cast<int>(ss.lp.rows.size()); ++row) {
                    LpRow out_row;
                    out_row.rel = ss.lp.rows[row].rel;
                    out_row.rhs = ss.lp.rows[row].rhs;
                    for (auto [var, coef] : ss.lp.rows[row].coeffs)
                        out_row.coeffs.emplace_back(base + var, coef);
                    for (int j = 0; j < m; ++j)
                        if (ss.xcoef(row, j) != 0.0) out_row.coeffs.emplace_back(j, ss.xcoef(row, j));
                    lp.add_row(std::move(out_row));
                }
                blocks.emplace(ap.mask, std::make_pair(base, std::move(ss)));
            }

    for (std::size_t i = 0; i < p_hat.support.size(); ++i) {
        Scenario a = p_hat.support[i];
        for (Scenario ap : phi[a.mask]) {
            const auto& [base, ss] = blocks.at(ap.mask);
            LpRow row;
            row.rel = Relation::Ge;
            row.rhs = 0.0;
            row.coeffs.emplace_back(theta[i], 1.0);
            row.coeffs.emplace_back(y_var, metric(a, ap));
            for (int t = 0; t < ss.lp.num_vars(); ++t)
                if (ss.lp.objective[t] != 0.0) row.coeffs.emplace_back(base + t, -ss.lp.objective[t]);
            lp.add_row(std::move(row));
        }
    }

    LpSolution sol = solve_lp(lp);
    if (sol.status != LpStatus::Optimal) throw NumericalFailure("DR-LP did not solve to optimality");

    CollapsibleResult out;
    out.x_bar = Vec(m);
    for (int j = 0; j < m; ++j) out.x_bar[j] = std::clamp(sol.primal[j], 0.0, 1.0);
    out.value = sol.value;
    out.x_tilde = rounder ? (*rounder)(out.x_bar) : problem.local_round(out.x_bar);
    out.value_tilde = c.dot(out.x_tilde) + collapsible_inner_max(problem, out.x_tilde, p_hat, r, metric);
    return out;
}

FreeSetGxyOracleFn exact_free_oracle(const CoverProblem& problem, const ScenarioMetric& metric) {
    const CoverProblem* prob = &problem;
    ScenarioMetric sigma = metric;
    return [prob, sigma](std::uint64_t free_elements, double y, Scenario a) {
        const int n = prob->ground_size();
        if (n > 20) throw TooLarge("free-set oracle enumeration limited to 20 elements");
        Vec zero = Vec::Zero(prob->dim());
        Scenario free(free_elements);
        GxyResult out;
        out.scenario = a;
        out.value = prob->g(zero, a.minus(free));
        for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
            Scenario s(mask);
            double v = prob->g(zero, s.minus(free)) - y * sigma(a, s);
            if (v > out.value + 1e-12) {
                out.scenario = s;
                out.value = v;
            }
        }
        return out;
    };
}

SetCoverSpecialResult solve_setcover_specialized(const CoverProblem& problem,
                                                 const ExplicitDistribution& p_hat, double r,
                                                 const ScenarioMetric& metric,
                                                 const FreeSetGxyOracleFn& oracle, double eps) {
    p_hat.validate();
    const int m = problem.dim();
    const int n = problem.ground_size();
    const Vec& c = problem.first_stage_cost();
    const Vec zero = Vec::Zero(m);
    const int rows = static_cast<int>(p_hat.support.size());
    double sigma_max = metric.sigma_max(n);

    SetCoverSpecialResult out;
    GxyOracleFn plain = [&](const Vec&, double y, Scenario a) { return oracle(0, y, a); };
    auto lbr = lower_bound(problem, r, sigma_max, plain);
    if (lbr.zero_optimal) {
        out.zero_optimal = true;
        out.x_bar = out.x_tilde = zero;
        auto t = approx_transport(problem, zero, p_hat, r, metric, plain);
        out.f_bar = t.transport.value;
        return out;
    }

    double kappa = kappa_from(eps, lbr.lb);
    double kprime = c.norm() + problem.bound_K();
    double R = problem.bound_R(), V = problem.bound_V();
    double mu = std::min(1.0, kappa / (2.0 * kprime * R));
    int N = iteration_budget(m, mu * V / (2.0 * R));

    double scale = c.sum();
    for (Scenario s : p_hat.support) scale = std::max(scale, problem.g(zero, s));
    const double tol = std::ldexp(scale + 1.0, -40);

    auto free_set_of = [&](const Vec& x) {
        std::uint64_t mask = 0;
        for (int e = 0; e < n; ++e) {
            double covered = 0.0;
            for (int s = 0; s < m; ++s)
                if (problem.set_masks()[s] >> e & 1ULL) covered += x[s];
            if (covered >= 0.5) mask |= 1ULL << e;
        }
        return mask;
    };

    EllipsoidState ell = EllipsoidState::ball(m, R);
    std::vector<CutRecord> cuts;
    double best_f = std::numeric_limits<double>::infinity();

    for (int i = 0; i <= N; ++i) {
        Vec normal;
        auto box = box_violation(ell.center);
        if (box) {
            normal = *box;
            out.trace.push_back({i, CutKind::Feasibility, 0.0});
        } else {
            const CutRecord* stale = nullptr;
            for (const auto& cut : cuts)
                if (cut.normal.dot(ell.center - cut.anchor) > 1e-9) {
                    stale = &cut;
                    break;
                }
            if (stale) {
                normal = stale->normal;
                out.trace.push_back({i, CutKind::Feasibility, 0.0});
            } else {
                std::uint64_t free_mask = free_set_of(ell.center);
                Scenario free(free_mask);
                // Column generation on (W_x): payoff g(0, A' \ S_x).
                TransportLpSpec spec;
                spec.row_mass = p_hat.prob;
                spec.budget = r;
                std::map<std::pair<int, std::uint64_t>, bool> seen;
                for (int row = 0; row < rows; ++row) {
                    Scenario a = p_hat.support[row];
                    spec.columns.push_back({row, a, problem.g(zero, a.minus(free)), 0.0});
                    seen[{row, a.mask}] = true;
                }
                TransportSolution sol;
                for (int round = 0; round < 500; ++round) {
                    sol = solve_transport_restricted(spec);
                    bool improved = false;
                    for (int row = 0; row < rows; ++row) {
                        GxyResult res = oracle(free_mask, sol.budget_dual, p_hat.support[row]);
                        if (res.value > sol.row_dual[row] + tol) {
                            auto key = std::make_pair(row, res.scenario.mask);
                            if (!seen[key]) {
                                seen[key] = true;
                                spec.columns.push_back(
                                    {row, res.scenario, problem.g(zero, res.scenario.minus(free)),
                                     metric(p_hat.support[row], res.scenario)});
                                improved = true;
                            }
                        }
                    }
                    if (!improved) break;
                }
                double f = 2.0 * c.dot(ell.center) + sol.value;
                normal = c;
                for (const auto& entry : sol.plan)
                    normal += entry.mass *
                              problem.scenario_subgradient(ell.center, entry.target.minus(free));
                out.trace.push_back({i, CutKind::Objective, f});
                if (f < best_f) {
                    best_f = f;
                    out.x_bar = ell.center;
                    out.f_bar = f;
                }
                if (normal.norm() <= 1e-12 * (1.0 + c.norm())) break;
                cuts.push_back({CutKind::Objective, normal, ell.center, Vec(), f});
            }
        }
        if (!update_or_stop(ell, normal)) break;
    }
    out.x_tilde = out.x_bar.cwiseMin(1.0).cwiseMax(0.0) * 2.0;
    out.x_tilde = out.x_tilde.cwiseMin(1.0);
    return out;
}

double convsolve_omega(const ConvexMinimizeParams& p) {
    double N = std::ceil(2.0 * p.m * p.m * std::log(16.0 * p.lipschitz * p.R * p.R / (p.V * p.kappa)));
    double n = N * std::log(8.0 * N * p.lipschitz * p.R / p.kappa);
    return p.eps / (2.0 * n);
}

Vec minimize_convex(const ValueSubgradientOracle& oracle, const ConvexMinimizeParams& p) {
    double nd = std::ceil(2.0 * p.m * p.m * std::log(16.0 * p.lipschitz * p.R * p.R / (p.V * p.kappa)));
    if (!(nd < 2e5)) throw TooLarge("convex minimization iteration budget");
    int N = std::max(1, static_cast<int>(nd));

    EllipsoidState ell = EllipsoidState::ball(p.m, p.R);
    Vec best;
    double best_value = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= N; ++i) {
        Vec normal;
        auto box = box_violation(ell.center);
        if (box) {
            normal = *box;
        } else {
            auto [value, sub] = oracle(ell.center);
            if (value < best_value) {
                best_value = value;
                best = ell.center;
            }
            if (sub.norm() <= 1e-14 * (1.0 + std::abs(value))) return ell.center;
            normal = sub;
        }
        if (!update_or_stop(ell, normal)) break;
    }
    if (best.size() == 0) throw NumericalFailure("no feasible center found");
    return best;
}

}  // namespace drts
