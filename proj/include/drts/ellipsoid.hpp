#ifndef DRTS_ELLIPSOID_HPP
#define DRTS_ELLIPSOID_HPP

#include <functional>
#include <optional>
#include <vector>

#include "drts/gxy.hpp"
#include "drts/problem.hpp"

namespace drts {

/// Ellipsoid {x : (x-center)' shape^-1 (x-center) <= 1}. The shape matrix is
/// kept symmetric positive definite; update() performs the standard minimum
/// volume half-ellipsoid step for the halfspace a.(x - center) <= 0.
struct EllipsoidState {
    Vec center;
    Mat shape;
    int iteration = 0;

    static EllipsoidState ball(int m, double radius);

    /// One cut step; throws NumericalFailure on degenerate normals or when
    /// the shape matrix condition number exceeds 1e14.
    void update(const Vec& normal);

    double volume_factor() const;  // det^(1/2) ratio vs the unit ball
};

enum class CutKind { Feasibility, Objective };

struct CutRecord {
    CutKind kind = CutKind::Feasibility;
    Vec normal;
    Vec anchor;     // ellipsoid center the cut passes through
    Vec x_tilde;    // objective cuts only
    double f_tilde = 0.0;
};

struct TraceEntry {
    int iteration = 0;
    CutKind kind = CutKind::Feasibility;
    double f_tilde = 0.0;  // 0 for feasibility cuts
};

/// d = c + sum_{(A,A')} gamma_{A,A'} d^{x,A'}. With gamma beta-approximate
/// for (T_{p,x}) this is a (1 - 1/beta)-subgradient of h_p at x.
Vec subgradient_from_transport(const TwoStageProblem& problem, const Vec& x,
                               const std::vector<TransportPlanEntry>& plan);

struct LowerBoundResult {
    bool zero_optimal = false;
    double lb = 0.0;
};

/// Either certifies x = 0 optimal (the oracle's g(0,0,A'') value is below
/// 1/beta1, so every scenario is null) or returns lb = r/(beta1*sigma_max).
LowerBoundResult lower_bound(const TwoStageProblem& problem, double r, double sigma_max,
                             const GxyOracleFn& oracle);

using LocalRounder = std::function<Vec(const Vec&)>;

struct SaaPolyResult {
    Vec x_tilde;
    double f_tilde = 0.0;
    double beta1 = 1.0, beta2 = 1.0;
    bool zero_optimal = false;
    std::vector<TraceEntry> trace;
};

/// Algorithm: ellipsoid over P = [0,1]^m starting from B(0,R); at feasible
/// centers x-bar, round to x-tilde, solve (T_{p,x-tilde}) approximately, and
/// cut along c + sum gamma d^{x-bar,A'} (transport at the rounded point,
/// per-scenario subgradients at the center; the asymmetry is essential).
/// Returns the argmin-f among the recorded objective cuts; guarantees
/// f <= h_p(x-tilde) <= beta1*beta2*f and f <= rho(1+eps)*min_X h_p.
SaaPolyResult solve_saa_poly(const TwoStageProblem& problem, const ExplicitDistribution& p_hat,
                             double r, const ScenarioMetric& metric, const GxyOracleFn& oracle,
                             const LocalRounder& rounder, double eps);

struct CollapsibleResult {
    Vec x_bar;
    double value = 0.0;  // exact fractional optimum of the DR-LP
    Vec x_tilde;
    double value_tilde = 0.0;  // h_p(x_tilde), exact
};

/// Compact DR-LP over the collapsed scenario lists phi(A): variables x,
/// theta_A, y, and one second-stage copy z_{A'} per collapsed scenario;
/// solved exactly. The rounder defaults to the problem's local_round.
CollapsibleResult solve_saa_collapsible(const TwoStageProblem& problem,
                                        const ExplicitDistribution& p_hat, double r,
                                        const ScenarioMetric& metric,
                                        const std::optional<LocalRounder>& rounder = std::nullopt);

/// Exact inner max at x over the collapsed column set (valid whenever the
/// scenario collection is collapsible under the metric).
double collapsible_inner_max(const TwoStageProblem& problem, const Vec& x,
                             const ExplicitDistribution& p_hat, double r,
                             const ScenarioMetric& metric);

class CoverProblem;

/// Oracle for g(0,y,A) on the instance augmented with a zero-cost free set
/// covering `free_elements`.
using FreeSetGxyOracleFn = std::function<GxyResult(std::uint64_t free_elements, double y, Scenario a)>;

struct SetCoverSpecialResult {
    Vec x_bar;
    double f_bar = 0.0;
    Vec x_tilde;  // min{2 x_bar, 1}
    bool zero_optimal = false;
    std::vector<TraceEntry> trace;
};

/// Set-cover specialization: cuts priced on (W_x) with the free set
/// S_x = {e : sum_{S contains e} x_S >= 1/2}, f = 2c'x + (W_x) value;
/// avoids the rho loss, so f_bar <= 2(1+eps) * min_P h_p.
SetCoverSpecialResult solve_setcover_specialized(const CoverProblem& problem,
                                                 const ExplicitDistribution& p_hat, double r,
                                                 const ScenarioMetric& metric,
                                                 const FreeSetGxyOracleFn& oracle, double eps);

/// Exact free-set oracle by enumeration (desk scale).
FreeSetGxyOracleFn exact_free_oracle(const CoverProblem& problem, const ScenarioMetric& metric);

/// (value, omega-subgradient) oracle for a convex function on [0,1]^m.
using ValueSubgradientOracle = std::function<std::pair<double, Vec>(const Vec&)>;

struct ConvexMinimizeParams {
    int m = 0;
    double R = 1.0, V = 0.5;  // P contained in B(0,R), contains a V-ball
    double lipschitz = 1.0;   // K-tilde
    double eps = 0.1;
    double kappa = 1e-6;
    double delta = 0.1;  // recorded; failure probability is the oracle's
};

/// omega-subgradient ellipsoid minimization over [0,1]^m:
/// N = ceil(2m^2 ln(16KR^2/(V kappa))) iterations, returns the argmin-value
/// feasible center; F(x) <= F*/(1-eps) + kappa when the oracle honors
/// omega = eps/2n, n = N ln(8NKR/kappa).
Vec minimize_convex(const ValueSubgradientOracle& oracle, const ConvexMinimizeParams& params);

/// The omega the convsolve parameters prescribe for a given setup.
double convsolve_omega(const ConvexMinimizeParams& params);

}  // namespace drts

#endif
