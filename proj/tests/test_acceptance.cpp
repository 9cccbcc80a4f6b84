// Acceptance gate: one pass/fail line per criterion, nonzero exit on failure.
// Everything here is scored against brute-force references at desk scale.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "drts/ellipsoid.hpp"
#include "drts/exactref.hpp"
#include "drts/instance.hpp"
#include "drts/linfty.hpp"
#include "drts/saa.hpp"

using namespace drts;

namespace {

Instance gen(ProblemFamily family, std::uint64_t seed, int ground = 4, int actions = 4) {
    GenParams gp;
    gp.ground = ground;
    gp.actions = actions;
    return generate_instance(family, gp, seed);
}

const std::vector<ProblemFamily> kAllFamilies{
    ProblemFamily::SetCover, ProblemFamily::VertexCover, ProblemFamily::EdgeCover,
    ProblemFamily::FacilityLocation, ProblemFamily::Steiner};

// Reference fractional DR optimum: the same LP shape solve_saa_collapsible
// uses, but with every scenario of 2^U as a candidate target instead of the
// collapsed lists. Agreement certifies the collapse.
double full_universe_drlp(const TwoStageProblem& problem, const ExplicitDistribution& p_hat,
                          double r, const ScenarioMetric& metric) {
    const int m = problem.dim();
    const int n = problem.ground_size();
    const Vec& c = problem.first_stage_cost();

    LinearProgram lp;
    lp.sense = Sense::Min;
    for (int j = 0; j < m; ++j) lp.add_variable(c[j], 1.0);
    int y_var = lp.add_variable(r);
    std::vector<int> theta(p_hat.support.size());
    for (std::size_t i = 0; i < p_hat.support.size(); ++i)
        theta[i] = lp.add_variable(p_hat.prob[i]);

    std::map<std::uint64_t, std::pair<int, SecondStageLp>> blocks;
    for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
        SecondStageLp ss = problem.second_stage(Scenario(mask));
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
        blocks.emplace(mask, std::make_pair(base, std::move(ss)));
    }
    for (std::size_t i = 0; i < p_hat.support.size(); ++i)
        for (auto& [mask, entry] : blocks) {
            auto& [base, ss] = entry;
            LpRow row;
            row.rel = Relation::Ge;
            row.rhs = 0.0;
            row.coeffs.emplace_back(theta[i], 1.0);
            row.coeffs.emplace_back(y_var, metric(p_hat.support[i], Scenario(mask)));
            for (int t = 0; t < ss.lp.num_vars(); ++t)
                if (ss.lp.objective[t] != 0.0)
                    row.coeffs.emplace_back(base + t, -ss.lp.objective[t]);
            lp.add_row(std::move(row));
        }

    LpSolution sol = solve_lp(lp);
    if (sol.status != LpStatus::Optimal) throw NumericalFailure("reference DR-LP failed");
    return sol.value;
}

bool criterion_1() {
    for (auto family : kAllFamilies) {
        int per_family = 100;
        // Steiner reference LPs carry a flow block per enumerated scenario;
        // 3+ terminals makes the dense simplex crawl for minutes.
        int ground = family == ProblemFamily::Steiner ? 2 : 4;
        for (int t = 0; t < per_family; ++t) {
            Instance inst = gen(family, split_seed(1, t * 10 + static_cast<int>(family)), ground);
            auto res = solve_saa_collapsible(*inst.problem, *inst.explicit_dist, inst.radius,
                                             inst.metric);
            double ref = full_universe_drlp(*inst.problem, *inst.explicit_dist, inst.radius,
                                            inst.metric);
            if (std::abs(res.value - ref) > 1e-6 * std::max(1.0, std::abs(ref))) return false;
        }
    }
    return true;
}

bool criterion_2() {
    const double eps = 0.1;
    std::vector<ProblemFamily> families{ProblemFamily::SetCover, ProblemFamily::VertexCover,
                                        ProblemFamily::EdgeCover,
                                        ProblemFamily::FacilityLocation};
    for (auto family : families)
        for (int t = 0; t < 25; ++t) {
            Instance inst = gen(family, split_seed(2, t * 10 + static_cast<int>(family)));
            auto& prob = *inst.problem;
            EnumeratedUniverse uni(prob.ground_size());
            GxyOracleFn oracle = [&](const Vec& x, double y, Scenario a) {
                return exact_gxy(prob, x, y, a, inst.metric, uni);
            };
            auto res = solve_saa_poly(prob, *inst.explicit_dist, inst.radius, inst.metric, oracle,
                                      [&](const Vec& x) { return prob.local_round(x); }, eps);
            auto ball = inst.ambiguity_ball();
            double h = exact_inner_max(prob, res.x_tilde, ball, uni).value;
            double opt = exact_discrete_optimum(prob, ball, uni).value;
            double tol = 1e-6 * std::max(1.0, std::abs(h));
            // Exact oracle: f equals h at the rounded point.
            if (std::abs(res.f_tilde - h) > tol) return false;
            if (res.f_tilde > prob.local_rho() * (1.0 + eps) * opt + tol) return false;
        }
    return true;
}

bool criterion_3() {
    std::mt19937_64 rng(303);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    auto sigma = ScenarioMetric::discrete();
    for (int t = 0; t < 100; ++t) {
        Instance inst = gen(ProblemFamily::SetCover, split_seed(3, t));
        auto& prob = *inst.problem;
        EnumeratedUniverse uni(prob.ground_size());
        const auto& p = *inst.explicit_dist;
        double r = U(rng);
        Vec x(prob.dim());
        for (int j = 0; j < prob.dim(); ++j) x[j] = U(rng);

        auto dec = decompose_short_long(prob, x, p, r, sigma);
        auto ball = AmbiguityBall::wasserstein(CentralDistribution::from_explicit(p), r, sigma);
        double h = exact_inner_max(prob, x, ball, uni).value;
        double proxy = prob.first_stage_cost().dot(x) + dec.z_short + dec.z_long_at_zero;
        if (h > proxy + 1e-6 || proxy > 2.0 * h + 1e-6) return false;

        // Concavity of z_long in p along a random chord.
        if (t % 10 == 0) {
            ExplicitDistribution q = p;
            double total = 0.0;
            for (auto& w : q.prob) {
                w = 0.05 + U(rng);
                total += w;
            }
            for (auto& w : q.prob) w /= total;
            double zp = z_long_at_zero(prob, p, r, sigma);
            double zq = z_long_at_zero(prob, q, r, sigma);
            ExplicitDistribution mix = p;
            for (std::size_t i = 0; i < p.prob.size(); ++i)
                mix.prob[i] = 0.5 * (p.prob[i] + q.prob[i]);
            if (z_long_at_zero(prob, mix, r, sigma) < 0.5 * (zp + zq) - 1e-7) return false;
        }
    }
    return true;
}

bool criterion_4() {
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (auto family : kAllFamilies) {
        int ground = family == ProblemFamily::Steiner ? 3 : 4;
        for (int call = 0; call < 50; ++call) {
            Instance inst = gen(family, split_seed(4, call * 10 + static_cast<int>(family)),
                                ground);
            auto& prob = *inst.problem;
            const int n = prob.ground_size();
            EnumeratedUniverse uni(n);
            Vec x(prob.dim());
            for (int j = 0; j < prob.dim(); ++j) x[j] = U(rng);
            double y = 3.0 * U(rng);
            Scenario a(rng() % (1ULL << n));

            MaxminOracleFn maxmin = [&](const Vec& xx) {
                Scenario best;
                double bg = -1.0;
                for (Scenario s : uni.scenarios())
                    if (prob.g(xx, s) > bg) {
                        bg = prob.g(xx, s);
                        best = s;
                    }
                return best;
            };
            auto check = [&](const GxyResult& res) {
                for (Scenario ap : uni.scenarios()) {
                    double rhs = prob.g(x, ap) / res.beta1 -
                                 res.beta2 * y * inst.metric(a, ap);
                    if (res.value < rhs - 1e-9) return false;
                }
                return true;
            };
            if (!check(gxy_discrete(prob, x, y, a, maxmin, 1.0))) return false;
            if (!check(exact_gxy(prob, x, y, a, inst.metric, uni))) return false;
            ConstrainedOracleFn constrained = [&](const Vec& xx, Scenario aa, double mu) {
                Scenario best = aa;
                double bg = prob.g(xx, aa);
                for (Scenario s : uni.scenarios())
                    if (inst.metric(aa, s) <= mu && prob.g(xx, s) > bg) {
                        bg = prob.g(xx, s);
                        best = s;
                    }
                return best;
            };
            if (!check(gxy_enumerated(prob, x, y, a, inst.metric, constrained, 1.0, 0.0)))
                return false;
        }
    }
    return true;
}

bool criterion_5() {
    std::mt19937_64 rng(505);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    int probes = 0;
    for (int t = 0; t < 100; ++t) {
        int clients = 5 + static_cast<int>(rng() % 3);  // <= 7
        Instance inst = gen(ProblemFamily::FacilityLocation, split_seed(5, t), clients, 3);
        auto& fl = static_cast<const FacilityLocationProblem&>(*inst.problem);
        Vec zero = Vec::Zero(fl.dim());
        int k = 1 + static_cast<int>(rng() % 4);
        double greedy = fl.g(zero, kmaxmin_fl_greedy(fl, zero, k));
        double brute = fl.g(zero, kmaxmin_bruteforce(fl, zero, k));
        if (greedy < brute / 6.0 - 1e-9) return false;

        // Cost share invariants on random probes against the same instance.
        const std::uint64_t full = (1ULL << fl.n_clients()) - 1;
        for (int probe = 0; probe < 5; ++probe) {
            Vec x(fl.dim());
            for (int i = 0; i < fl.dim(); ++i) x[i] = rng() % 3 == 0 ? 1.0 : 0.0;
            Scenario j2(1 + rng() % full);
            auto t2 = fl_cost_shares(fl, x, j2);
            double g = fl.g(x, j2);
            if (t2.total > g + 1e-7) return false;
            if (t2.total < g / 3.0 - 1e-7) return false;
            Scenario j1(j2.mask & (rng() % (full + 1)));
            if (!j1.empty()) {
                auto t1 = fl_cost_shares(fl, x, j1);
                for (int j : j1.members())
                    if (t2.share_of(j) > t1.share_of(j) + 1e-9) return false;
            }
            ++probes;
        }
    }
    return probes >= 500;
}

bool criterion_6() {
    struct Setup {
        ProblemFamily family;
        bool linf;
        double ceiling;
    };
    std::vector<Setup> setups{{ProblemFamily::VertexCover, false, 16.0 * 1.2},
                              {ProblemFamily::EdgeCover, false, 12.0 * 1.2},
                              {ProblemFamily::FacilityLocation, false, 21.96 * 1.2},
                              {ProblemFamily::VertexCover, true, 8.0 * 1.2}};
    const double eps = 0.1;
    for (const auto& s : setups) {
        int within = 0;
        for (int t = 0; t < 100; ++t) {
            Instance inst = gen(s.family, split_seed(6, t * 10 + (s.linf ? 5 : 0) +
                                                            static_cast<int>(s.family)));
            auto& prob = *inst.problem;
            EnumeratedUniverse uni(prob.ground_size());
            Vec x;
            if (s.linf) {
                inst.ball = BallMetric::Linf;
                inst.radius = 0.25;
                x = solve_linfty(prob, inst.center(), inst.radius, eps, 0.1, split_seed(60, t))
                        .x_bar;
            } else {
                GxyOracleFn oracle = [&](const Vec& xx, double y, Scenario a) {
                    return exact_gxy(prob, xx, y, a, inst.metric, uni);
                };
                x = solve_saa_poly(prob, *inst.explicit_dist, inst.radius, inst.metric, oracle,
                                   [&](const Vec& xx) { return prob.local_round(xx); }, eps)
                        .x_tilde;
            }
            auto ball = inst.ambiguity_ball();
            double cost = exact_inner_max(prob, x, ball, uni).value;
            double opt = exact_discrete_optimum(prob, ball, uni).value;
            if (opt <= 1e-12 || cost <= s.ceiling * opt + 1e-9) ++within;
        }
        if (within < 95) return false;
    }
    return true;
}

bool criterion_7() {
    std::mt19937_64 rng(707);
    std::uniform_real_distribution<double> U(0.0, 1.0);

    // Sandwich with exact expectations and exact free mass.
    for (int t = 0; t < 100; ++t) {
        Instance inst = gen(ProblemFamily::SetCover, split_seed(7, t));
        auto& prob = *inst.problem;
        EnumeratedUniverse uni(prob.ground_size());
        const auto& p = *inst.explicit_dist;
        double r = 0.05 + 0.95 * U(rng);
        Vec x(prob.dim());
        for (int j = 0; j < prob.dim(); ++j) x[j] = U(rng);
        auto est = exact_free_mass(p, r);
        auto ball = AmbiguityBall::linf(CentralDistribution::from_explicit(p), r);
        double h = exact_inner_max(prob, x, ball, uni).value;
        double proxy = proxy_value(prob, x, CentralDistribution::from_explicit(p), est, 64, 1);
        if (h > proxy + 1e-6 || proxy > 2.0 * h + 1e-6) return false;
    }

    // Greedy fill vs LP over K.
    for (int t = 0; t < 100; ++t) {
        int len = 2 + static_cast<int>(rng() % 6);
        std::vector<double> g(len);
        for (double& v : g) v = 10.0 * U(rng);
        std::sort(g.rbegin(), g.rend());
        double r = 0.05 + 0.95 * U(rng);
        double cap = std::max(r, std::min(1.0, r * (0.5 + 2.0 * U(rng))));
        std::vector<std::pair<Scenario, double>> seq;
        for (int i = 0; i < len; ++i) seq.emplace_back(Scenario(i), g[i]);
        LinearProgram lp;
        lp.sense = Sense::Max;
        LpRow sum{{}, Relation::Le, std::min(cap, r * len)};
        for (int i = 0; i < len; ++i) sum.coeffs.emplace_back(lp.add_variable(g[i], r), 1.0);
        lp.add_row(std::move(sum));
        if (std::abs(optimal_q(cap, r, seq).value - solve_lp(lp).value) > 1e-9) return false;
    }

    // Free-mass bracket on the noisy skewed center.
    auto skew = CentralDistribution::from_explicit(
        {{Scenario(0b001), Scenario(0b010)}, {0.7, 0.3}});
    int hits = 0;
    for (int t = 0; t < 100; ++t) {
        auto e = estimate_free_mass(skew, 0.3, 0.1, 0.1, split_seed(70, t));
        if (e.p_free_hat >= 0.6 - 1e-12 && e.p_free_hat <= 0.6 * 1.1 + 1e-12) ++hits;
    }
    return hits >= 95;
}

bool criterion_8() {
    auto vc = CoverProblem::vc3();
    Instance inst;
    inst.family = ProblemFamily::VertexCover;
    inst.problem = std::make_shared<CoverProblem>(vc);
    inst.ball = BallMetric::Wasserstein;
    inst.radius = 0.25;
    inst.sampler = IndependentSampler{{0.9, 0.3, 0.5}};
    auto center = inst.center();

    ExplicitDistribution truth;
    for (std::uint64_t m = 0; m < 8; ++m) {
        double pr = 1.0;
        for (int j = 0; j < 3; ++j) {
            double marg = inst.sampler->marginal[j];
            pr *= ((m >> j) & 1) ? marg : 1.0 - marg;
        }
        truth.support.emplace_back(m);
        truth.prob.push_back(pr);
    }
    EnumeratedUniverse uni(3);
    auto ball = AmbiguityBall::wasserstein(CentralDistribution::from_explicit(truth), inst.radius,
                                           inst.metric);
    double opt = exact_discrete_optimum(vc, ball, uni).value;
    double threshold = 4.0 * vc.local_rho() * 2.0 * opt;

    double prev = -1.0;
    for (int n : {50, 200, 800}) {
        int successes = 0;
        for (int t = 0; t < 100; ++t) {
            SaaConfig cfg;
            cfg.eps = 0.2;
            cfg.replicates = 8;
            cfg.n_samples = n;
            cfg.seed = split_seed(8, n * 1000 + t);
            SaaSolverFn solver = [&](const ExplicitDistribution& p_hat) {
                auto res = solve_saa_collapsible(vc, p_hat, inst.radius, inst.metric);
                return std::make_pair(res.x_tilde, res.value_tilde);
            };
            auto rep = run_saa(center, cfg, solver);
            if (exact_inner_max(vc, rep.x_hat, ball, uni).value <= threshold + 1e-9) ++successes;
        }
        double rate = successes / 100.0;
        if (rate < prev - 1e-12) return false;
        prev = rate;
    }
    return prev >= 0.95;
}

bool criterion_9() {
    std::mt19937_64 rng(909);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int inst_i = 0; inst_i < 3; ++inst_i) {
        Instance inst = gen(ProblemFamily::SetCover, split_seed(9, inst_i));
        auto& prob = *inst.problem;
        EnumeratedUniverse uni(prob.ground_size());
        const auto& p = *inst.explicit_dist;
        auto wball = AmbiguityBall::wasserstein(CentralDistribution::from_explicit(p),
                                                inst.radius, inst.metric);
        auto est = exact_free_mass(p, 0.3);
        auto lball = AmbiguityBall::linf(CentralDistribution::from_explicit(p), 0.3);
        double omega = 1e-3;
        for (int probe = 0; probe < 100; ++probe) {
            Vec u(prob.dim()), v(prob.dim());
            for (int j = 0; j < prob.dim(); ++j) {
                u[j] = U(rng);
                v[j] = U(rng);
            }
            // Exact transport plan -> true subgradient of h at u.
            auto at_u = exact_inner_max(prob, u, wball, uni);
            Vec d = subgradient_from_transport(prob, u, at_u.plan);
            double hu = at_u.value;
            double hv = exact_inner_max(prob, v, wball, uni).value;
            if (hv - hu < d.dot(v - u) - 1e-7) return false;

            // omega-subgradient of the proxy.
            auto centre = CentralDistribution::from_explicit(p);
            double fu = proxy_value(prob, u, centre, est, 64, 1);
            double fv = proxy_value(prob, v, centre, est, 64, 1);
            Vec s = proxy_subgradient(prob, u, centre, est, omega, 0.1, 1);
            if (fv - fu < s.dot(v - u) - omega * fu - 1e-7) return false;
        }
    }
    return true;
}

bool criterion_10() {
#ifndef DRTS_CLI_PATH
    return false;
#else
    std::string dir = "acceptance_tmp";
    if (std::system(("mkdir -p " + dir).c_str()) != 0) return false;
    Instance inst = gen(ProblemFamily::VertexCover, 1234);
    {
        std::ofstream f(dir + "/det.inst", std::ios::binary);
        f << serialize_instance(inst);
    }
    auto run = [&](const std::string& out) {
        std::string cmd = std::string(DRTS_CLI_PATH) + " solve " + dir +
                          "/det.inst --method saa-ellipsoid --exact --seed 5 --out " + dir +
                          "/run.out";
        if (std::system(cmd.c_str()) != 0) return false;
        return std::system(("cp " + dir + "/run.out " + dir + "/" + out).c_str()) == 0;
    };
    if (!run("first") || !run("second")) return false;
    std::ifstream a(dir + "/first", std::ios::binary), b(dir + "/second", std::ios::binary);
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    return sa.str().size() > 0 && sa.str() == sb.str();
#endif
}

}  // namespace

int main() {
    struct Entry {
        const char* what;
        bool (*fn)();
    };
    std::vector<Entry> entries{
        {"collapsible DR-LP matches the full-universe reference (1e-6)", criterion_1},
        {"ellipsoid solver contract: f = h(x~) and f <= rho(1+eps) OPT", criterion_2},
        {"short/long proxy sandwich and z_long concavity", criterion_3},
        {"(beta1,beta2) oracle contract vs enumerated competitors", criterion_4},
        {"FL k-max-min greedy factor 6 and cost-share invariants", criterion_5},
        {"end-to-end ratio ceilings (VC 19.2, EC 14.4, FL 26.352, Linf VC 9.6)", criterion_6},
        {"L-infinity machinery: sandwich, greedy K max, free-mass bracket", criterion_7},
        {"SAA success rate nondecreasing in N, >= 0.95 at N = 800", criterion_8},
        {"subgradient inequalities at random probe pairs", criterion_9},
        {"CLI determinism: byte-identical rerun under one manifest", criterion_10},
    };
    int failures = 0;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        bool ok = false;
        try {
            ok = entries[i].fn();
        } catch (const std::exception& e) {
            std::fprintf(stderr, "criterion %zu threw: %s\n", i + 1, e.what());
        }
        std::printf("criterion %2zu: %s  %s\n", i + 1, ok ? "PASS" : "FAIL", entries[i].what);
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    return failures;
}
