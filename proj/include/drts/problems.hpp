#ifndef DRTS_PROBLEMS_HPP
#define DRTS_PROBLEMS_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "drts/problem.hpp"

namespace drts {

/// Covering problems: set cover and its vertex/edge-cover specializations.
/// Ground elements are scenario bits; first-stage variables are sets.
class CoverProblem : public TwoStageProblem {
  public:
    enum class Family { SetCover, VertexCover, EdgeCover };

    /// `declared_lambda` may exceed the max cost ratio; (P2) then still holds.
    CoverProblem(Family family, int n_elements, std::vector<std::uint64_t> set_masks,
                 Vec cost1, Vec cost2, std::optional<double> declared_lambda = std::nullopt);

    /// Triangle graph, unit vertex costs, stage-II cost 2 (the VC3 fixture).
    static CoverProblem vc3();

    Family family() const { return family_; }
    int dim() const override { return static_cast<int>(set_masks_.size()); }
    int ground_size() const override { return n_elements_; }
    const Vec& first_stage_cost() const override { return cost1_; }
    double inflation() const override { return lambda_; }
    double tau() const override { return cost2_.sum(); }

    SecondStageLp second_stage(Scenario a) const override;
    Vec local_round(const Vec& x) const override;
    double local_rho() const override { return 2.0 * deterministic_alpha(); }
    RoundedRecourse integral_recourse(const Vec& x, Scenario a) const override;
    double deterministic_alpha() const override;

    const std::vector<std::uint64_t>& set_masks() const { return set_masks_; }
    const Vec& second_stage_cost() const { return cost2_; }

    /// Integral cover of `elements` by sets with the given costs; free sets
    /// are excluded from the result but their coverage is applied first.
    /// VC: threshold; EC: exact subset DP; SC: greedy (H_n-approximate).
    RoundedRecourse cover_integrally(std::uint64_t elements, const Vec& set_cost,
                                     const std::vector<char>& free_set) const;

  private:
    Family family_;
    int n_elements_;
    std::vector<std::uint64_t> set_masks_;
    Vec cost1_, cost2_;
    double lambda_;
};

/// Two-stage metric uncapacitated facility location. First-stage variables
/// open facilities at cost f; stage II opens at f2 and assigns scenario
/// clients (scenario bits index clients).
class FacilityLocationProblem : public TwoStageProblem {
  public:
    FacilityLocationProblem(Mat facility_client_dist, Vec f1, Vec f2);

    /// Facilities at 0 and 10 on a line, f=1, f2=2, clients at 0, 5, 10.
    static FacilityLocationProblem fl2();

    int dim() const override { return static_cast<int>(f1_.size()); }
    int ground_size() const override { return static_cast<int>(dist_.cols()); }
    const Vec& first_stage_cost() const override { return f1_; }
    double inflation() const override { return lambda_; }
    double tau() const override;

    SecondStageLp second_stage(Scenario a) const override;
    Vec local_round(const Vec& x) const override;
    double local_rho() const override { return 5.488; }
    RoundedRecourse integral_recourse(const Vec& x, Scenario a) const override;
    double deterministic_alpha() const override { return 4.0; }

    int n_facilities() const { return dim(); }
    int n_clients() const { return ground_size(); }
    double dist(int facility, int client) const { return dist_(facility, client); }
    const Vec& stage2_open_cost() const { return f2_; }

    /// Stage-II opening cost with first-stage openings free: 0 if x_i = 1.
    Vec effective_open_cost(const Vec& x) const;

  private:
    Mat dist_;  // facilities x clients
    Vec f1_, f2_;
    double lambda_;
};

/// Two-stage Steiner tree on a complete metric graph with root s = node 0 and
/// uniform inflation. Scenario bits index the non-root terminals 1..n-1.
/// The second-stage LP is the monotone flow relaxation: per-terminal unit
/// flow to the root, split into a stage-I-supported part (capacity x) and a
/// stage-II part (capacity z), with stage-I inflow at each non-root node
/// bounded by stage-I outflow so stage-I edges are only used next to the root.
class SteinerProblem : public TwoStageProblem {
  public:
    SteinerProblem(Mat node_dist, double lambda);

    int dim() const override { return n_edges_; }
    int ground_size() const override { return static_cast<int>(node_dist_.rows()) - 1; }
    const Vec& first_stage_cost() const override { return edge_cost_; }
    double inflation() const override { return lambda_; }
    double tau() const override;
    SecondStageLp second_stage(Scenario a) const override;
    Vec local_round(const Vec& x) const override;
    double local_rho() const override { return 10.0; }  // reported, not certified
    RoundedRecourse integral_recourse(const Vec& x, Scenario a) const override;
    double deterministic_alpha() const override { return 2.0; }

    int n_nodes() const { return static_cast<int>(node_dist_.rows()); }
    const Mat& node_distances() const { return node_dist_; }
    int edge_index(int u, int v) const;
    std::pair<int, int> edge_nodes(int e) const { return edges_[e]; }

    /// MST-through-bought-components heuristic: connects terminals to the
    /// root using bought edges for free; returns edge ids and metric cost.
    RoundedRecourse steiner_completion(const std::vector<char>& bought, Scenario a) const;

  private:
    Mat node_dist_;
    double lambda_;
    int n_edges_;
    std::vector<std::pair<int, int>> edges_;
    Vec edge_cost_;  // stage-I cost per edge
};

/// Factor-2 conversion of an arbitrary integral first stage into a stage-I
/// tree containing the root, valid for the monotone formulation.
Vec monotone_reduction_check(const SteinerProblem& prob, const Vec& x_bar);

struct RestrictedRoundReport {
    Vec x_tilde;
    std::vector<double> scenario_cost;  // integral completion per scenario
    std::vector<double> rho_emp;        // completion cost / flow-LP value
};

/// Rounds x over the finite scenario list (collapse output), reporting the
/// measured locality ratio per scenario rather than certifying a factor.
RestrictedRoundReport restricted_local_round_steiner(const SteinerProblem& prob, const Vec& x,
                                                     const std::vector<Scenario>& scenarios);

}  // namespace drts

#endif
