#ifndef DRTS_INSTANCE_HPP
#define DRTS_INSTANCE_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "drts/problems.hpp"

namespace drts {

enum class ProblemFamily { SetCover, VertexCover, EdgeCover, FacilityLocation, Steiner };

std::string family_name(ProblemFamily f);
ProblemFamily family_from_name(const std::string& name);

/// Black-box sampler description: each ground element appears independently
/// with its marginal probability. Draws are pure in (seed, index).
struct IndependentSampler {
    std::vector<double> marginal;
};

/// A parsed instance file: problem, scenario metric, ambiguity ball, and the
/// central distribution (explicit support or an independent-marginal sampler).
struct Instance {
    ProblemFamily family = ProblemFamily::SetCover;
    std::shared_ptr<TwoStageProblem> problem;
    ScenarioMetric metric = ScenarioMetric::discrete();
    BallMetric ball = BallMetric::Wasserstein;
    double radius = 0.0;
    std::optional<ExplicitDistribution> explicit_dist;
    std::optional<IndependentSampler> sampler;

    CentralDistribution center() const;
    AmbiguityBall ambiguity_ball() const;
};

/// Line-oriented text format; see serialize_instance for the layout. Throws
/// ParseError with a line diagnostic on malformed input.
Instance parse_instance(const std::string& text);
Instance parse_instance_file(const std::string& path);

std::string serialize_instance(const Instance& inst);

struct GenParams {
    int ground = 4;     // elements / clients / terminals
    int actions = 4;    // sets / facilities (ignored for steiner)
    bool large = false; // lift the enumeration guards
};

/// Deterministic random instance within exactref guards (unless large).
Instance generate_instance(ProblemFamily family, const GenParams& params, std::uint64_t seed);

/// FNV-1a 64-bit over the raw bytes, hex-encoded; used as the manifest's
/// instance content hash.
std::string content_hash(const std::string& bytes);

}  // namespace drts

#endif
