#include <algorithm>
#include <cmath>
#include <numeric>

#include "drts/problems.hpp"

namespace drts {

FacilityLocationProblem::FacilityLocationProblem(Mat facility_client_dist, Vec f1, Vec f2)
    : dist_(std::move(facility_client_dist)), f1_(std::move(f1)), f2_(std::move(f2)) {
    const int nf = static_cast<int>(dist_.rows());
    const int nc = static_cast<int>(dist_.cols());
    if (f1_.size() != nf || f2_.size() != nf) throw Error("facility cost dimensions mismatch");
    if (nc > 16) throw TooLarge("client universe limited to 16");
    if (dist_.minCoeff() < 0) throw Error("distances must be nonnegative");
    // Quadrilateral form of the triangle inequality over the bipartite metric.
    for (int i = 0; i < nf; ++i)
        for (int j = 0; j < nc; ++j)
            for (int ip = 0; ip < nf; ++ip)
                for (int jp = 0; jp < nc; ++jp)
                    if (dist_(i, j) > dist_(i, jp) + dist_(ip, jp) + dist_(ip, j) + 1e-9)
                        throw Error("distance matrix violates the triangle inequality");
    lambda_ = 1.0;
    for (int i = 0; i < nf; ++i) {
        if (f1_[i] <= 0 || f2_[i] < 0) throw Error("facility costs must be positive / nonnegative");
        lambda_ = std::max(lambda_, f2_[i] / f1_[i]);
    }
}

FacilityLocationProblem FacilityLocationProblem::fl2() {
    Mat d(2, 3);
    d << 0, 5, 10,
        10, 5, 0;
    return FacilityLocationProblem(d, make_vec({1, 1}), make_vec({2, 2}));
}

double FacilityLocationProblem::tau() const {
    double min_pos = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_facilities(); ++i)
        for (int j = 0; j < n_clients(); ++j)
            if (dist_(i, j) > 0) min_pos = std::min(min_pos, dist_(i, j));
    if (!std::isfinite(min_pos)) min_pos = 1.0;
    // The discrete scenario metric has granularity 1, so the divisor may not
    // exceed 1 if (P6) is to hold under either metric kind.
    return (f2_.sum() + dist_.sum()) / std::min(1.0, min_pos);
}

SecondStageLp FacilityLocationProblem::second_stage(Scenario a) const {
    SecondStageLp ss;
    const int nf = n_facilities();
    for (int i = 0; i < nf; ++i) ss.lp.add_variable(f2_[i], 1.0);
    auto clients = a.members();
    std::vector<std::vector<int>> wvar(clients.size(), std::vector<int>(nf));
    for (std::size_t cj = 0; cj < clients.size(); ++cj)
        for (int i = 0; i < nf; ++i)
            wvar[cj][i] = ss.lp.add_variable(dist_(i, clients[cj]), 1.0);

    const int n_rows = static_cast<int>(clients.size()) * (1 + nf);
    ss.xcoef = Mat::Zero(n_rows, nf);
    int row = 0;
    for (std::size_t cj = 0; cj < clients.size(); ++cj) {
        LpRow assign;
        for (int i = 0; i < nf; ++i) assign.coeffs.push_back({wvar[cj][i], 1.0});
        assign.rel = Relation::Eq;
        assign.rhs = 1.0;
        ss.lp.add_row(std::move(assign));
        ++row;
        for (int i = 0; i < nf; ++i) {
            // w_ij <= x_i + z_i
            ss.lp.add_row({{{wvar[cj][i], 1.0}, {i, -1.0}}, Relation::Le, 0.0});
            ss.xcoef(row, i) = -1.0;
            ++row;
        }
    }
    return ss;
}

Vec FacilityLocationProblem::effective_open_cost(const Vec& x) const {
    Vec f = f2_;
    for (int i = 0; i < n_facilities(); ++i)
        if (x[i] >= 0.5) f[i] = 0.0;
    return f;
}

RoundedRecourse FacilityLocationProblem::integral_recourse(const Vec& x, Scenario a) const {
    const int nf = n_facilities();
    std::vector<int> closed;
    for (int i = 0; i < nf; ++i)
        if (x[i] < 0.5) closed.push_back(i);
    RoundedRecourse best;
    best.cost = std::numeric_limits<double>::infinity();
    const std::uint64_t subsets = 1ULL << closed.size();
    for (std::uint64_t sub = 0; sub < subsets; ++sub) {
        std::vector<char> open(nf, 0);
        double cost = 0.0;
        for (int i = 0; i < nf; ++i) open[i] = x[i] >= 0.5;
        std::vector<int> opened;
        for (std::size_t b = 0; b < closed.size(); ++b)
            if (sub >> b & 1) {
                open[closed[b]] = 1;
                opened.push_back(closed[b]);
                cost += f2_[closed[b]];
            }
        bool any = false;
        for (int i = 0; i < nf; ++i) any |= open[i];
        if (!any) {
            if (a.empty() && cost < best.cost) best = {0.0, {}};
            continue;
        }
        for (int j : a.members()) {
            double nearest = std::numeric_limits<double>::infinity();
            for (int i = 0; i < nf; ++i)
                if (open[i]) nearest = std::min(nearest, dist_(i, j));
            cost += nearest;
        }
        if (cost < best.cost) best = {cost, opened};
    }
    if (!std::isfinite(best.cost)) throw Error("no facility can be opened for a nonempty scenario");
    return best;
}

Vec FacilityLocationProblem::local_round(const Vec& x) const {
    // Filtering: each client half-served by the first stage gets an open
    // facility within a constant multiple of its half-service radius; balls
    // of the clients that trigger an opening are disjoint, so the opening
    // cost is at most twice c'x.
    const int nf = n_facilities();
    const int nc = n_clients();
    double total = x.sum();
    struct Cand { int client; double radius; };
    std::vector<Cand> stage1;
    for (int j = 0; j < nc; ++j) {
        if (total < 0.5 - 1e-9) break;  // nobody is half-served
        std::vector<int> order(nf);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return dist_(a, j) < dist_(b, j); });
        double mass = 0.0, radius = std::numeric_limits<double>::infinity();
        for (int i : order) {
            mass += x[i];
            if (mass >= 0.5 - 1e-9) { radius = dist_(i, j); break; }
        }
        if (std::isfinite(radius)) stage1.push_back({j, radius});
    }
    std::sort(stage1.begin(), stage1.end(), [](const Cand& a, const Cand& b) {
        return a.radius != b.radius ? a.radius < b.radius : a.client < b.client;
    });
    Vec xt = Vec::Zero(nf);
    for (const Cand& cand : stage1) {
        bool served = false;
        for (int i = 0; i < nf; ++i)
            if (xt[i] == 1.0 && dist_(i, cand.client) <= 3.0 * cand.radius + 1e-9) served = true;
        if (served) continue;
        int cheapest = -1;
        for (int i = 0; i < nf; ++i) {
            if (dist_(i, cand.client) > cand.radius + 1e-9) continue;
            if (cheapest < 0 || f1_[i] < f1_[cheapest]) cheapest = i;
        }
        if (cheapest >= 0) xt[cheapest] = 1.0;
    }
    return xt;
}

}  // namespace drts
