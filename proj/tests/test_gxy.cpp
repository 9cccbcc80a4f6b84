#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "drts/exactref.hpp"
#include "drts/gxy.hpp"
#include "drts/problems.hpp"

using namespace drts;

namespace {

GxyOracleFn exact_oracle(const TwoStageProblem& prob, const ScenarioMetric& sigma,
                         const EnumeratedUniverse& uni) {
    return [&](const Vec& x, double y, Scenario a) { return exact_gxy(prob, x, y, a, sigma, uni); };
}

MaxminOracleFn exact_maxmin(const TwoStageProblem& prob, const EnumeratedUniverse& uni) {
    return [&](const Vec& x) {
        Scenario best;
        double best_g = -1.0;
        for (Scenario s : uni.scenarios()) {
            double v = prob.g(x, s);
            if (v > best_g + 1e-12) {
                best = s;
                best_g = v;
            }
        }
        return best;
    };
}

ConstrainedOracleFn exact_constrained(const TwoStageProblem& prob, const ScenarioMetric& sigma,
                                      const EnumeratedUniverse& uni) {
    return [&](const Vec& x, Scenario a, double mu) {
        Scenario best = a;
        double best_g = -1.0;
        for (Scenario s : uni.scenarios()) {
            if (sigma(a, s) > mu + 1e-12) continue;
            double v = prob.g(x, s);
            if (v > best_g + 1e-12) {
                best = s;
                best_g = v;
            }
        }
        return best;
    };
}

void check_guarantee(const TwoStageProblem& prob, const ScenarioMetric& sigma,
                     const EnumeratedUniverse& uni, const Vec& x, double y, Scenario a,
                     const GxyResult& res) {
    for (Scenario ap : uni.scenarios()) {
        double rhs = prob.g(x, ap) / res.beta1 - res.beta2 * y * sigma(a, ap);
        CHECK(res.value >= rhs - 1e-7);
    }
}

}  // namespace

TEST_CASE("gxy_discrete on VC3") {
    auto vc = CoverProblem::vc3();
    EnumeratedUniverse uni(3);
    auto oracle = exact_maxmin(vc, uni);
    Vec zero = Vec::Zero(3);
    Scenario e12(0b001);

    auto r0 = gxy_discrete(vc, zero, 0.0, e12, oracle, 1.0);
    CHECK(r0.value == doctest::Approx(3.0));
    CHECK(r0.scenario == Scenario(0b111));

    auto r10 = gxy_discrete(vc, zero, 10.0, e12, oracle, 1.0);
    CHECK(r10.value == doctest::Approx(2.0));
    CHECK(r10.scenario == e12);

    auto r1 = gxy_discrete(vc, zero, 1.0, e12, oracle, 1.0);
    CHECK(r1.value == doctest::Approx(2.0));

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    auto sigma = ScenarioMetric::discrete();
    for (int probe = 0; probe < 25; ++probe) {
        Vec x(3);
        for (int j = 0; j < 3; ++j) x[j] = U(rng);
        double y = 4.0 * U(rng);
        Scenario a(rng() % 8);
        auto res = gxy_discrete(vc, x, y, a, oracle, 1.0);
        check_guarantee(vc, sigma, uni, x, y, a, res);
    }
}

TEST_CASE("gxy_enumerated matches gxy_discrete under the discrete metric") {
    auto vc = CoverProblem::vc3();
    EnumeratedUniverse uni(3);
    auto sigma = ScenarioMetric::discrete();
    auto con = exact_constrained(vc, sigma, uni);
    auto maxmin = exact_maxmin(vc, uni);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int probe = 0; probe < 20; ++probe) {
        Vec x(3);
        for (int j = 0; j < 3; ++j) x[j] = U(rng);
        double y = 3.0 * U(rng);
        Scenario a(rng() % 8);
        auto e = gxy_enumerated(vc, x, y, a, sigma, con, 1.0, 0.0);
        auto d = gxy_discrete(vc, x, y, a, maxmin, 1.0);
        CHECK(e.value == doctest::Approx(d.value).epsilon(1e-9));
    }
}

TEST_CASE("gxy_enumerated with a geometric grid on the FL2 line metric") {
    auto fl = FacilityLocationProblem::fl2();
    EnumeratedUniverse uni(3);
    Mat base(3, 3);
    base << 0, 5, 10,
            5, 0, 5,
           10, 5, 0;
    auto sigma = ScenarioMetric::asym_inf(base);
    auto con = exact_constrained(fl, sigma, uni);
    Vec zero = Vec::Zero(2);
    Scenario a(0b001);
    auto res = gxy_enumerated(fl, zero, 0.1, a, sigma, con, 1.0, 0.25);
    CHECK(res.beta2 == doctest::Approx(1.25));
    // Against brute force: value within the (1, 1.25) guarantee.
    check_guarantee(fl, sigma, uni, zero, 0.1, a, res);
    // y = 0 ignores sigma entirely.
    auto r0 = gxy_enumerated(fl, zero, 0.0, a, sigma, con, 1.0, 0.25);
    CHECK(r0.value == doctest::Approx(fl.g(zero, Scenario(0b111))));
}

TEST_CASE("collapse lists") {
    auto vc = CoverProblem::vc3();
    auto disc = collapse(vc, Scenario(0b001), ScenarioMetric::discrete());
    REQUIRE(disc.size() == 2);
    CHECK(disc[0] == Scenario(0b001));
    CHECK(disc[1] == Scenario(0b111));
    auto at_full = collapse(vc, Scenario(0b111), ScenarioMetric::discrete());
    REQUIRE(at_full.size() == 1);
    CHECK(at_full[0] == Scenario(0b111));

    auto fl = FacilityLocationProblem::fl2();
    Mat base(3, 3);
    base << 0, 5, 10,
            5, 0, 5,
           10, 5, 0;
    auto line = collapse(fl, Scenario(0b001), ScenarioMetric::asym_inf(base));
    REQUIRE(line.size() == 3);
    CHECK(line[0] == Scenario(0b001));
    CHECK(line[1] == Scenario(0b011));
    CHECK(line[2] == Scenario(0b111));
}

TEST_CASE("collapse contains an optimizer for every (x,y)") {
    auto vc = CoverProblem::vc3();
    EnumeratedUniverse uni(3);
    auto sigma = ScenarioMetric::discrete();
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int probe = 0; probe < 30; ++probe) {
        Vec x(3);
        for (int j = 0; j < 3; ++j) x[j] = U(rng);
        double y = 4.0 * U(rng);
        Scenario a(rng() % 8);
        double exact = exact_gxy(vc, x, y, a, sigma, uni).value;
        double restricted = -1e9;
        for (Scenario s : collapse(vc, a, sigma))
            restricted = std::max(restricted, vc.g(x, s) - y * sigma(a, s));
        CHECK(restricted == doctest::Approx(exact).epsilon(1e-9));
    }
}

TEST_CASE("approx_transport with an exact oracle is exact") {
    auto vc = CoverProblem::vc3();
    EnumeratedUniverse uni(3);
    auto sigma = ScenarioMetric::discrete();
    auto oracle = exact_oracle(vc, sigma, uni);
    ExplicitDistribution p{{Scenario(0b001), Scenario(0b111)}, {0.5, 0.5}};
    Vec zero = Vec::Zero(3);

    auto t25 = approx_transport(vc, zero, p, 0.25, sigma, oracle);
    CHECK(t25.transport.value == doctest::Approx(2.75));

    auto t0 = approx_transport(vc, zero, p, 0.0, sigma, oracle);
    CHECK(t0.transport.value == doctest::Approx(2.5));
    for (const auto& entry : t0.transport.plan)
        CHECK(entry.target == p.support[entry.row]);

    auto tmax = approx_transport(vc, zero, p, 1.0, sigma, oracle);
    CHECK(tmax.transport.value == doctest::Approx(3.0));  // r >= sigma_max
}

TEST_CASE("approx_transport value brackets the exact inner max") {
    auto vc = CoverProblem::vc3();
    EnumeratedUniverse uni(3);
    auto sigma = ScenarioMetric::discrete();
    auto oracle = exact_oracle(vc, sigma, uni);
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int trial = 0; trial < 25; ++trial) {
        Vec x(3);
        for (int j = 0; j < 3; ++j) x[j] = U(rng);
        double w = U(rng), r = U(rng);
        ExplicitDistribution p{{Scenario(rng() % 8), Scenario()}, {w, 1.0 - w}};
        if (p.support[0] == p.support[1]) continue;
        auto ball = AmbiguityBall::wasserstein(CentralDistribution::from_explicit(p), r, sigma);
        double exact = exact_inner_max(vc, x, ball, uni).expectation;
        auto approx = approx_transport(vc, x, p, r, sigma, oracle);
        CHECK(approx.transport.value <= exact + 1e-7);
        CHECK(approx.transport.value >= exact / (approx.beta1 * approx.beta2) - 1e-6);
    }
}

TEST_CASE("kmaxmin brute force on VC3") {
    auto vc = CoverProblem::vc3();
    Vec zero = Vec::Zero(3);
    CHECK(kmaxmin_bruteforce(vc, zero, 3) == Scenario(0b111));
    Scenario one = kmaxmin_bruteforce(vc, zero, 1);
    CHECK(one == Scenario(0b001));  // lexicographic among the g=2 ties
    CHECK(vc.g(zero, one) == doctest::Approx(2.0));
    CHECK(kmaxmin_bruteforce(vc, zero, 0) == Scenario());
}

TEST_CASE("FL cost shares on the FL2 fixture") {
    auto fl = FacilityLocationProblem::fl2();
    Vec zero = Vec::Zero(2);
    CHECK(fl_cost_shares(fl, zero, Scenario()).clients.empty());

    Scenario all(0b111);
    auto table = fl_cost_shares(fl, zero, all);
    double g = fl.g(zero, all);
    CHECK(table.total <= g + 1e-9);
    CHECK(table.total >= g / 3.0 - 1e-9);

    // A facility opened in stage I caps the singleton share by its distance.
    Vec open0 = make_vec({1, 0});
    auto solo = fl_cost_shares(fl, open0, Scenario(0b010));
    CHECK(solo.share_of(1) <= fl.dist(0, 1) + 1e-9);
    CHECK(solo.share_of(1) <= fl.g(open0, Scenario(0b010)) + 1e-9);
}

namespace {

FacilityLocationProblem random_fl(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(0.0, 10.0);
    int nf = 2 + static_cast<int>(rng() % 3);
    int nc = 3 + static_cast<int>(rng() % 4);
    Mat d(nf, nc);
    std::vector<double> fpos(nf), cpos(nc);
    for (auto& p : fpos) p = U(rng);
    for (auto& p : cpos) p = U(rng);
    for (int i = 0; i < nf; ++i)
        for (int j = 0; j < nc; ++j) d(i, j) = std::abs(fpos[i] - cpos[j]);
    Vec f1(nf), f2(nf);
    for (int i = 0; i < nf; ++i) {
        f1[i] = 0.5 + U(rng) / 4.0;
        f2[i] = f1[i] * (1.0 + U(rng) / 10.0);
    }
    return FacilityLocationProblem(d, f1, f2);
}

}  // namespace

TEST_CASE("cost share invariants on random instances") {
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    int insertion_checked = 0;
    for (int inst = 0; inst < 25; ++inst) {
        auto fl = random_fl(rng);
        Vec x(fl.dim());
        for (int i = 0; i < fl.dim(); ++i) x[i] = rng() % 3 == 0 ? 1.0 : 0.0;
        const std::uint64_t full = (1ULL << fl.n_clients()) - 1;
        for (int probe = 0; probe < 20; ++probe) {
            Scenario j2(rng() % (full + 1));
            if (j2.empty()) continue;
            auto t2 = fl_cost_shares(fl, x, j2);
            double g = fl.g(x, j2);
            CHECK(t2.total <= g + 1e-7);            // competitiveness
            CHECK(t2.total >= g / 3.0 - 1e-7);      // 3-cost-recovery
            // Cross-monotonicity against a random subset.
            Scenario j1(j2.mask & (rng() % (full + 1)));
            if (!j1.empty()) {
                auto t1 = fl_cost_shares(fl, x, j1);
                for (int j : j1.members()) CHECK(t2.share_of(j) <= t1.share_of(j) + 1e-9);
            }
            // Insertion lemma: xi(J+j2,j1) >= min{xi(J,j1), xi(J+j2,j2)}.
            auto mem = j2.members();
            if (mem.size() >= 2) {
                int ja = mem[rng() % mem.size()], jb = mem[rng() % mem.size()];
                if (ja != jb) {
                    Scenario base = j2.without(ja).without(jb);
                    auto with_b = fl_cost_shares(fl, x, base.with(jb).with(ja));
                    auto just_a = fl_cost_shares(fl, x, base.with(ja));
                    CHECK(with_b.share_of(ja) >=
                          std::min(just_a.share_of(ja), with_b.share_of(jb)) - 1e-9);
                    ++insertion_checked;
                }
            }
        }
    }
    CHECK(insertion_checked >= 100);
}

TEST_CASE("greedy k-max-min for FL stays within factor 6") {
    std::mt19937_64 rng(53);
    for (int inst = 0; inst < 20; ++inst) {
        auto fl = random_fl(rng);
        Vec x = Vec::Zero(fl.dim());
        for (int k = 1; k <= std::min(4, fl.n_clients()); ++k) {
            Scenario greedy = kmaxmin_fl_greedy(fl, x, k);
            Scenario brute = kmaxmin_bruteforce(fl, x, k);
            CHECK(greedy.size() <= k);
            CHECK(fl.g(x, greedy) >= fl.g(x, brute) / 6.0 - 1e-9);
        }
    }
    auto fl2 = FacilityLocationProblem::fl2();
    Scenario all = kmaxmin_fl_greedy(fl2, Vec::Zero(2), 3);
    CHECK(all == Scenario(0b111));
}

TEST_CASE("cover heuristic hits the brute-force optimum on VC3") {
    auto vc = CoverProblem::vc3();
    Vec zero = Vec::Zero(3);
    CHECK(kmaxmin_cover_heuristic(vc, zero, 5) == Scenario(0b111));
    Scenario two = kmaxmin_cover_heuristic(vc, zero, 2);
    CHECK(vc.g(zero, two) == doctest::Approx(vc.g(zero, kmaxmin_bruteforce(vc, zero, 2))));
    Vec ones = Vec::Ones(3);
    CHECK(vc.g(ones, kmaxmin_cover_heuristic(vc, ones, 2)) == doctest::Approx(0.0));
}
