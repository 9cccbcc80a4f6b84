#include <algorithm>
#include <cmath>

#include "drts/problems.hpp"

namespace drts {

CoverProblem::CoverProblem(Family family, int n_elements, std::vector<std::uint64_t> set_masks,
                           Vec cost1, Vec cost2, std::optional<double> declared_lambda)
    : family_(family),
      n_elements_(n_elements),
      set_masks_(std::move(set_masks)),
      cost1_(std::move(cost1)),
      cost2_(std::move(cost2)) {
    if (n_elements_ < 1 || n_elements_ > 16) throw TooLarge("cover ground set limited to 16 elements");
    std::uint64_t all = (1ULL << n_elements_) - 1, covered = 0;
    for (auto m : set_masks_) covered |= m;
    if (covered != all) throw Error("some element is covered by no set");
    lambda_ = 1.0;
    for (Eigen::Index i = 0; i < cost1_.size(); ++i) {
        if (cost1_[i] <= 0 || cost2_[i] < 0) throw Error("cover costs must be positive / nonnegative");
        lambda_ = std::max(lambda_, cost2_[i] / cost1_[i]);
    }
    if (declared_lambda) {
        if (*declared_lambda < lambda_) throw Error("declared inflation below the cost ratio");
        lambda_ = *declared_lambda;
    }
}

CoverProblem CoverProblem::vc3() {
    // Elements are the triangle's edges e12, e13, e23; sets are vertices.
    // Stage-I cost 2 makes x=0 the robust optimum; lambda is declared as 2.
    return CoverProblem(Family::VertexCover, 3, {0b011, 0b101, 0b110},
                        make_vec({2, 2, 2}), make_vec({2, 2, 2}), 2.0);
}

SecondStageLp CoverProblem::second_stage(Scenario a) const {
    SecondStageLp ss;
    const int m = dim();
    for (int s = 0; s < m; ++s) ss.lp.add_variable(cost2_[s], 1.0);
    auto elems = a.members();
    ss.xcoef = Mat::Zero(static_cast<Eigen::Index>(elems.size()), m);
    int row = 0;
    for (int e : elems) {
        LpRow r;
        for (int s = 0; s < m; ++s)
            if (set_masks_[s] >> e & 1) {
                r.coeffs.push_back({s, 1.0});
                ss.xcoef(row, s) = 1.0;
            }
        r.rel = Relation::Ge;
        r.rhs = 1.0;
        ss.lp.add_row(std::move(r));
        ++row;
    }
    return ss;
}

double CoverProblem::deterministic_alpha() const {
    switch (family_) {
        case Family::VertexCover: return 2.0;
        case Family::EdgeCover: return 1.5;
        case Family::SetCover: {
            double h = 0.0;
            for (int i = 1; i <= n_elements_; ++i) h += 1.0 / i;
            return h;
        }
    }
    return 2.0;
}

RoundedRecourse CoverProblem::cover_integrally(std::uint64_t elements, const Vec& set_cost,
                                               const std::vector<char>& free_set) const {
    const int m = dim();
    std::uint64_t left = elements;
    for (int s = 0; s < m; ++s)
        if (free_set[s]) left &= ~set_masks_[s];
    RoundedRecourse out;
    if (left == 0) return out;

    if (family_ == Family::VertexCover) {
        // Round the covering LP at threshold 1/2; every element is in two
        // sets, so the threshold always covers.
        LinearProgram lp;
        for (int s = 0; s < m; ++s) lp.add_variable(free_set[s] ? 0.0 : set_cost[s], 1.0);
        for (int e = 0; e < n_elements_; ++e) {
            if (!(left >> e & 1)) continue;
            LpRow r;
            for (int s = 0; s < m; ++s)
                if (set_masks_[s] >> e & 1) r.coeffs.push_back({s, 1.0});
            r.rel = Relation::Ge;
            r.rhs = 1.0;
            lp.add_row(std::move(r));
        }
        LpSolution sol = solve_lp(lp);
        for (int s = 0; s < m; ++s)
            if (!free_set[s] && sol.primal[s] >= 0.5 - 1e-9) {
                out.actions.push_back(s);
                out.cost += set_cost[s];
            }
        return out;
    }

    if (family_ == Family::EdgeCover) {
        // Exact minimum-cost cover by subset DP (ground set is small).
        std::vector<double> best(1ULL << n_elements_, std::numeric_limits<double>::infinity());
        std::vector<int> choice(1ULL << n_elements_, -1);
        best[0] = 0.0;
        for (std::uint64_t sub = 1; sub < (1ULL << n_elements_); ++sub) {
            if ((sub & left) != sub) continue;
            int e = __builtin_ctzll(sub);
            for (int s = 0; s < m; ++s) {
                if (free_set[s] || !(set_masks_[s] >> e & 1)) continue;
                double c = set_cost[s] + best[sub & ~set_masks_[s]];
                if (c < best[sub]) { best[sub] = c; choice[sub] = s; }
            }
        }
        std::uint64_t sub = left;
        while (sub) {
            int s = choice[sub];
            out.actions.push_back(s);
            out.cost += set_cost[s];
            sub &= ~set_masks_[s];
        }
        return out;
    }

    // Set cover: greedy by cost per newly covered element.
    while (left) {
        int pick = -1;
        double pick_ratio = 0.0;
        for (int s = 0; s < m; ++s) {
            if (free_set[s]) continue;
            int gain = __builtin_popcountll(set_masks_[s] & left);
            if (gain == 0) continue;
            double ratio = set_cost[s] / gain;
            if (pick < 0 || ratio < pick_ratio - 1e-12) { pick = s; pick_ratio = ratio; }
        }
        out.actions.push_back(pick);
        out.cost += set_cost[pick];
        left &= ~set_masks_[pick];
    }
    return out;
}

Vec CoverProblem::local_round(const Vec& x) const {
    // Elements fractionally half-covered by the first stage must be covered
    // integrally here; 2x is a feasible fractional cover for them, so the
    // family rounder applies with a factor-2 cost blowup.
    std::uint64_t half_covered = 0;
    for (int e = 0; e < n_elements_; ++e) {
        double mass = 0.0;
        for (int s = 0; s < dim(); ++s)
            if (set_masks_[s] >> e & 1) mass += x[s];
        if (mass >= 0.5 - 1e-9) half_covered |= 1ULL << e;
    }
    std::vector<char> nothing_free(dim(), 0);
    RoundedRecourse cover;
    if (family_ == Family::VertexCover) {
        // Threshold 2x at 1/2, i.e. x at 1/4: with two sets per element this
        // covers every half-covered element.
        for (int s = 0; s < dim(); ++s)
            if (x[s] >= 0.25 - 1e-9) cover.actions.push_back(s);
    } else {
        cover = cover_integrally(half_covered, cost1_, nothing_free);
    }
    Vec xt = Vec::Zero(dim());
    for (int s : cover.actions) xt[s] = 1.0;
    return xt;
}

RoundedRecourse CoverProblem::integral_recourse(const Vec& x, Scenario a) const {
    std::vector<char> free_set(dim(), 0);
    for (int s = 0; s < dim(); ++s) free_set[s] = x[s] >= 0.5;
    return cover_integrally(a.mask, cost2_, free_set);
}

}  // namespace drts
