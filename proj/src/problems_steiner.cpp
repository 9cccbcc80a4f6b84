#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "drts/problems.hpp"

namespace drts {

namespace {

// Scenario bit v corresponds to graph node v+1; node 0 is the root s.
int node_of_bit(int bit) { return bit + 1; }

SecondStageLp build_flow_lp(const SteinerProblem& prob, const Mat& /*dist*/, double lambda,
                            const Vec& edge_cost, Scenario a, bool monotone) {
    SecondStageLp ss;
    const int n = prob.n_nodes();
    const int ne = prob.dim();
    // Arcs: 2 per edge; arc 2e = (u->v), arc 2e+1 = (v->u).
    const int na = 2 * ne;
    auto arc_tail = [&](int arc) {
        auto [u, v] = prob.edge_nodes(arc / 2);
        return arc % 2 == 0 ? u : v;
    };
    auto arc_head = [&](int arc) {
        auto [u, v] = prob.edge_nodes(arc / 2);
        return arc % 2 == 0 ? v : u;
    };

    for (int e = 0; e < ne; ++e) ss.lp.add_variable(lambda * edge_cost[e], 1.0);  // z_e
    auto terms = a.members();
    const int nt = static_cast<int>(terms.size());
    // f1[t][arc], f2[t][arc]
    std::vector<int> f1(static_cast<std::size_t>(nt) * na), f2(f1.size());
    for (int t = 0; t < nt; ++t)
        for (int arc = 0; arc < na; ++arc) {
            f1[t * na + arc] = ss.lp.add_variable(0.0, 1.0);
            f2[t * na + arc] = ss.lp.add_variable(0.0, 1.0);
        }

    std::vector<std::pair<int, int>> xrows;  // (row index, edge) for f1 <= x_e
    for (int t = 0; t < nt; ++t) {
        int term = node_of_bit(terms[t]);
        // (ccut): net outflow at the terminal >= 1.
        LpRow cut;
        for (int arc = 0; arc < na; ++arc) {
            if (arc_tail(arc) == term) {
                cut.coeffs.push_back({f1[t * na + arc], 1.0});
                cut.coeffs.push_back({f2[t * na + arc], 1.0});
            } else if (arc_head(arc) == term) {
                cut.coeffs.push_back({f1[t * na + arc], -1.0});
                cut.coeffs.push_back({f2[t * na + arc], -1.0});
            }
        }
        cut.rel = Relation::Ge;
        cut.rhs = 1.0;
        ss.lp.add_row(std::move(cut));
        // (cflowcons) and (cmono) at intermediate nodes.
        for (int u = 1; u < n; ++u) {
            if (u == term) continue;
            LpRow cons, mono;
            for (int arc = 0; arc < na; ++arc) {
                double dir = arc_tail(arc) == u ? 1.0 : (arc_head(arc) == u ? -1.0 : 0.0);
                if (dir == 0.0) continue;
                cons.coeffs.push_back({f1[t * na + arc], dir});
                cons.coeffs.push_back({f2[t * na + arc], dir});
                mono.coeffs.push_back({f1[t * na + arc], -dir});  // in - out <= 0
            }
            cons.rel = Relation::Eq;
            cons.rhs = 0.0;
            ss.lp.add_row(std::move(cons));
            if (monotone) {
                mono.rel = Relation::Le;
                mono.rhs = 0.0;
                ss.lp.add_row(std::move(mono));
            }
        }
        // (cdom): f1 <= x_e, f2 <= z_e per arc.
        for (int arc = 0; arc < na; ++arc) {
            xrows.push_back({static_cast<int>(ss.lp.rows.size()), arc / 2});
            ss.lp.add_row({{{f1[t * na + arc], 1.0}}, Relation::Le, 0.0});
            ss.lp.add_row({{{f2[t * na + arc], 1.0}, {arc / 2, -1.0}}, Relation::Le, 0.0});
        }
    }
    ss.xcoef = Mat::Zero(static_cast<Eigen::Index>(ss.lp.rows.size()), ne);
    for (auto [row, e] : xrows) ss.xcoef(row, e) = -1.0;
    return ss;
}

}  // namespace

SteinerProblem::SteinerProblem(Mat node_dist, double lambda)
    : node_dist_(std::move(node_dist)), lambda_(lambda) {
    const int n = static_cast<int>(node_dist_.rows());
    if (n < 2 || n > 17) throw TooLarge("steiner instance limited to 17 nodes");
    if (lambda_ < 1.0) throw Error("inflation must be at least 1");
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v) {
            if (node_dist_(u, v) < 0 || std::abs(node_dist_(u, v) - node_dist_(v, u)) > 1e-12)
                throw Error("steiner distances must be nonnegative and symmetric");
            for (int w = 0; w < n; ++w)
                if (node_dist_(u, v) > node_dist_(u, w) + node_dist_(w, v) + 1e-9)
                    throw Error("steiner distances violate the triangle inequality");
        }
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) edges_.push_back({u, v});
    n_edges_ = static_cast<int>(edges_.size());
    edge_cost_ = Vec(n_edges_);
    for (int e = 0; e < n_edges_; ++e) edge_cost_[e] = node_dist_(edges_[e].first, edges_[e].second);
}

int SteinerProblem::edge_index(int u, int v) const {
    if (u > v) std::swap(u, v);
    for (int e = 0; e < n_edges_; ++e)
        if (edges_[e] == std::pair<int, int>{u, v}) return e;
    throw Error("no such edge");
}

double SteinerProblem::tau() const {
    double min_pos = std::numeric_limits<double>::infinity();
    for (int e = 0; e < n_edges_; ++e)
        if (edge_cost_[e] > 0) min_pos = std::min(min_pos, edge_cost_[e]);
    if (!std::isfinite(min_pos)) min_pos = 1.0;
    return lambda_ * edge_cost_.sum() / std::min(1.0, min_pos);
}

SecondStageLp SteinerProblem::second_stage(Scenario a) const {
    return build_flow_lp(*this, node_dist_, lambda_, edge_cost_, a, /*monotone=*/true);
}

RoundedRecourse SteinerProblem::steiner_completion(const std::vector<char>& bought,
                                                   Scenario a) const {
    const int n = n_nodes();
    // Shortest paths where bought edges are free.
    Mat d = node_dist_;
    for (int e = 0; e < n_edges_; ++e)
        if (bought[e]) d(edges_[e].first, edges_[e].second) = d(edges_[e].second, edges_[e].first) = 0.0;
    for (int k = 0; k < n; ++k)
        for (int u = 0; u < n; ++u)
            for (int v = 0; v < n; ++v) d(u, v) = std::min(d(u, v), d(u, k) + d(k, v));
    // Prim MST over {s} plus the terminals, in the shortcut metric.
    std::vector<int> nodes{0};
    for (int bit : a.members()) nodes.push_back(node_of_bit(bit));
    std::vector<char> in_tree(nodes.size(), 0);
    std::vector<double> key(nodes.size(), std::numeric_limits<double>::infinity());
    std::vector<int> parent(nodes.size(), 0);
    key[0] = 0.0;
    RoundedRecourse out;
    for (std::size_t it = 0; it < nodes.size(); ++it) {
        int best = -1;
        for (std::size_t i = 0; i < nodes.size(); ++i)
            if (!in_tree[i] && (best < 0 || key[i] < key[best])) best = static_cast<int>(i);
        in_tree[best] = 1;
        if (best != 0 && key[best] > 1e-12) {
            out.cost += lambda_ * key[best];
            out.actions.push_back(edge_index(nodes[parent[best]], nodes[best]));
        }
        for (std::size_t i = 0; i < nodes.size(); ++i)
            if (!in_tree[i] && d(nodes[best], nodes[i]) < key[i]) {
                key[i] = d(nodes[best], nodes[i]);
                parent[i] = best;
            }
    }
    return out;
}

RoundedRecourse SteinerProblem::integral_recourse(const Vec& x, Scenario a) const {
    std::vector<char> bought(n_edges_, 0);
    for (int e = 0; e < n_edges_; ++e) bought[e] = x[e] >= 0.5;
    return steiner_completion(bought, a);
}

namespace {

// Spanning tree (by increasing cost) of the root component of the given
// integral edge set; everything else is dropped.
std::vector<char> root_component_tree(const SteinerProblem& prob, const std::vector<char>& sel) {
    const int n = prob.n_nodes();
    std::vector<int> comp(n);
    std::iota(comp.begin(), comp.end(), 0);
    std::function<int(int)> find = [&](int v) { return comp[v] == v ? v : comp[v] = find(comp[v]); };
    std::vector<int> order(prob.dim());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return prob.first_stage_cost()[a] < prob.first_stage_cost()[b];
    });
    std::vector<char> tree(prob.dim(), 0);
    for (int e : order) {
        if (!sel[e]) continue;
        auto [u, v] = prob.edge_nodes(e);
        if (find(u) == find(v)) continue;  // cycle edge dropped
        comp[find(u)] = find(v);
        tree[e] = 1;
    }
    // Keep only the component of the root.
    std::vector<char> keep(prob.dim(), 0);
    for (int e = 0; e < prob.dim(); ++e) {
        auto [u, v] = prob.edge_nodes(e);
        if (tree[e] && find(u) == find(0)) keep[e] = 1;
    }
    return keep;
}

}  // namespace

Vec SteinerProblem::local_round(const Vec& x) const {
    std::vector<char> sel(n_edges_, 0);
    for (int e = 0; e < n_edges_; ++e) sel[e] = x[e] >= 0.5;
    auto keep = root_component_tree(*this, sel);
    Vec xt = Vec::Zero(n_edges_);
    for (int e = 0; e < n_edges_; ++e) xt[e] = keep[e] ? 1.0 : 0.0;
    return xt;
}

Vec monotone_reduction_check(const SteinerProblem& prob, const Vec& x_bar) {
    std::vector<char> sel(prob.dim(), 0);
    for (int e = 0; e < prob.dim(); ++e) sel[e] = x_bar[e] >= 0.5;
    auto keep = root_component_tree(prob, sel);
    Vec xt = Vec::Zero(prob.dim());
    double cost_bar = 0.0, cost_tilde = 0.0;
    for (int e = 0; e < prob.dim(); ++e) {
        if (sel[e]) cost_bar += prob.first_stage_cost()[e];
        if (keep[e]) {
            xt[e] = 1.0;
            cost_tilde += prob.first_stage_cost()[e];
        }
    }
    if (cost_tilde > 2.0 * cost_bar + 1e-9)
        throw RoundingGuaranteeViolated("stage-I tree conversion exceeded twice the input cost");

    // Factor-2 check of the recourse costs over all scenarios: monotone g at
    // the tree vs plain (non-monotone) g at the input.
    if (prob.ground_size() <= 12) {
        for (std::uint64_t m = 1; m < (1ULL << prob.ground_size()); ++m) {
            Scenario a(m);
            double g_mon = prob.g(xt, a);
            SecondStageLp plain = build_flow_lp(prob, Mat(), prob.inflation(),
                                                prob.first_stage_cost(), a, /*monotone=*/false);
            double g_plain = std::max(0.0, solve_second_stage(plain, x_bar).value);
            if (g_mon > 2.0 * g_plain + 1e-6)
                throw RoundingGuaranteeViolated("monotone recourse exceeded twice the plain recourse");
        }
    }
    return xt;
}

RestrictedRoundReport restricted_local_round_steiner(const SteinerProblem& prob, const Vec& x,
                                                     const std::vector<Scenario>& scenarios) {
    RestrictedRoundReport rep;
    rep.x_tilde = prob.local_round(x);
    std::vector<char> bought(prob.dim(), 0);
    for (int e = 0; e < prob.dim(); ++e) bought[e] = rep.x_tilde[e] >= 0.5;
    for (Scenario a : scenarios) {
        double cost = prob.steiner_completion(bought, a).cost;
        double lp = prob.g(x, a);
        rep.scenario_cost.push_back(cost);
        rep.rho_emp.push_back(lp > 1e-12 ? cost / lp : (cost > 1e-12 ? std::numeric_limits<double>::infinity() : 1.0));
    }
    return rep;
}

}  // namespace drts
