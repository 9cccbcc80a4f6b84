#include "drts/instance.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace drts {

namespace {

// Shortest round-trip decimal form, locale independent.
std::string fmt(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::vector<std::string> tokens_of(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line);
    std::string t;
    while (is >> t) {
        if (t[0] == '#') break;
        out.push_back(t);
    }
    return out;
}

[[noreturn]] void fail(int line_no, const std::string& msg) {
    throw ParseError("line " + std::to_string(line_no) + ": " + msg);
}

double num(const std::string& t, int line_no) {
    try {
        std::size_t used = 0;
        double v = std::stod(t, &used);
        if (used != t.size()) fail(line_no, "bad number '" + t + "'");
        return v;
    } catch (const ParseError&) {
        throw;
    } catch (...) {
        fail(line_no, "bad number '" + t + "'");
    }
}

int integer(const std::string& t, int line_no) {
    double v = num(t, line_no);
    int i = static_cast<int>(v);
    if (i != v) fail(line_no, "expected an integer, got '" + t + "'");
    return i;
}

// Cursor over the non-comment lines of the file.
struct Reader {
    std::vector<std::pair<int, std::vector<std::string>>> lines;
    std::size_t pos = 0;

    explicit Reader(const std::string& text) {
        std::istringstream is(text);
        std::string line;
        int n = 0;
        while (std::getline(is, line)) {
            ++n;
            auto toks = tokens_of(line);
            if (!toks.empty()) lines.emplace_back(n, std::move(toks));
        }
    }
    bool done() const { return pos >= lines.size(); }
    const std::vector<std::string>& peek() const { return lines[pos].second; }
    int line_no() const { return done() ? -1 : lines[pos].first; }
    std::vector<std::string> take() { return lines[pos++].second; }
};

struct CoverRow {
    std::vector<int> elements;
    double c1, c2;
};

std::shared_ptr<TwoStageProblem> build_cover(ProblemFamily family, int ground,
                                             const std::vector<CoverRow>& rows,
                                             std::optional<double> lambda, int line_no) {
    if (rows.empty()) fail(line_no, "cover problem needs at least one set");
    std::vector<std::uint64_t> masks;
    Vec c1(rows.size()), c2(rows.size());
    for (std::size_t s = 0; s < rows.size(); ++s) {
        std::uint64_t m = 0;
        for (int e : rows[s].elements) {
            if (e < 0 || e >= ground) fail(line_no, "element out of range");
            m |= 1ULL << e;
        }
        masks.push_back(m);
        c1[s] = rows[s].c1;
        c2[s] = rows[s].c2;
    }
    auto fam = family == ProblemFamily::SetCover      ? CoverProblem::Family::SetCover
               : family == ProblemFamily::VertexCover ? CoverProblem::Family::VertexCover
                                                      : CoverProblem::Family::EdgeCover;
    return std::make_shared<CoverProblem>(fam, ground, masks, c1, c2, lambda);
}

Scenario scenario_of(const std::vector<std::string>& bits, std::size_t from, std::size_t to,
                     int ground, int line_no) {
    Scenario s;
    for (std::size_t i = from; i < to; ++i) {
        int e = integer(bits[i], line_no);
        if (e < 0 || e >= ground) fail(line_no, "scenario element out of range");
        s = s.with(e);
    }
    return s;
}

}  // namespace

std::string family_name(ProblemFamily f) {
    switch (f) {
        case ProblemFamily::SetCover: return "set_cover";
        case ProblemFamily::VertexCover: return "vertex_cover";
        case ProblemFamily::EdgeCover: return "edge_cover";
        case ProblemFamily::FacilityLocation: return "facility_location";
        case ProblemFamily::Steiner: return "steiner";
    }
    throw ParseError("unknown family");
}

ProblemFamily family_from_name(const std::string& name) {
    if (name == "set_cover") return ProblemFamily::SetCover;
    if (name == "vertex_cover") return ProblemFamily::VertexCover;
    if (name == "edge_cover") return ProblemFamily::EdgeCover;
    if (name == "facility_location") return ProblemFamily::FacilityLocation;
    if (name == "steiner") return ProblemFamily::Steiner;
    throw ParseError("unknown problem family '" + name + "'");
}

CentralDistribution Instance::center() const {
    if (explicit_dist) return CentralDistribution::from_explicit(*explicit_dist);
    if (!sampler) throw ParseError("instance has no distribution");
    auto marginal = sampler->marginal;
    return CentralDistribution::from_sampler([marginal](std::uint64_t seed, std::uint64_t index) {
        std::uint64_t draw = split_seed(seed, index);
        Scenario s;
        for (std::size_t j = 0; j < marginal.size(); ++j) {
            double u = static_cast<double>(split_seed(draw, j)) / 18446744073709551616.0;
            if (u < marginal[j]) s = s.with(static_cast<int>(j));
        }
        return s;
    });
}

AmbiguityBall Instance::ambiguity_ball() const {
    return ball == BallMetric::Wasserstein ? AmbiguityBall::wasserstein(center(), radius, metric)
                                           : AmbiguityBall::linf(center(), radius);
}

Instance parse_instance(const std::string& text) {
    Reader rd(text);
    Instance inst;
    int ground = -1;
    bool have_problem = false, have_ball = false;

    while (!rd.done()) {
        int ln = rd.line_no();
        auto toks = rd.take();
        const std::string& head = toks[0];

        if (head == "ground") {
            if (toks.size() != 3 || toks[1] != "elements") fail(ln, "expected 'ground elements N'");
            ground = integer(toks[2], ln);
            if (ground < 1 || ground > 62) fail(ln, "ground size out of range");
        } else if (head == "problem") {
            if (ground < 0) fail(ln, "'ground' must precede 'problem'");
            if (toks.size() != 2) fail(ln, "expected 'problem <family>'");
            try {
                inst.family = family_from_name(toks[1]);
            } catch (const ParseError& e) {
                fail(ln, e.what());
            }
            std::optional<double> lambda;
            std::vector<CoverRow> rows;
            std::vector<std::pair<Vec, std::pair<double, double>>> facilities;
            std::vector<std::vector<double>> node_rows;
            while (!rd.done() && rd.peek()[0] != "end") {
                int bln = rd.line_no();
                auto b = rd.take();
                if (b[0] == "lambda" && b.size() == 2) {
                    lambda = num(b[1], bln);
                } else if (b[0] == "set") {
                    auto colon = std::find(b.begin(), b.end(), ":");
                    if (colon == b.end() || b.end() - colon != 3)
                        fail(bln, "expected 'set e... : c1 c2'");
                    CoverRow row;
                    for (auto it = b.begin() + 1; it != colon; ++it)
                        row.elements.push_back(integer(*it, bln));
                    row.c1 = num(*(colon + 1), bln);
                    row.c2 = num(*(colon + 2), bln);
                    rows.push_back(std::move(row));
                } else if (b[0] == "facility") {
                    auto colon = std::find(b.begin(), b.end(), ":");
                    if (colon == b.end() || colon - b.begin() != 3 ||
                        b.end() - colon != ground + 1)
                        fail(bln, "expected 'facility f1 f2 : d_0 ... d_{n-1}'");
                    Vec d(ground);
                    for (int j = 0; j < ground; ++j) d[j] = num(*(colon + 1 + j), bln);
                    facilities.push_back({d, {num(b[1], bln), num(b[2], bln)}});
                } else if (b[0] == "node") {
                    std::vector<double> row;
                    for (std::size_t i = 1; i < b.size(); ++i) row.push_back(num(b[i], bln));
                    if (static_cast<int>(row.size()) != ground + 1)
                        fail(bln, "node row needs one distance per node");
                    node_rows.push_back(std::move(row));
                } else {
                    fail(bln, "unknown problem line '" + b[0] + "'");
                }
            }
            if (rd.done()) fail(ln, "problem block missing 'end'");
            rd.take();
            switch (inst.family) {
                case ProblemFamily::SetCover:
                case ProblemFamily::VertexCover:
                case ProblemFamily::EdgeCover:
                    inst.problem = build_cover(inst.family, ground, rows, lambda, ln);
                    break;
                case ProblemFamily::FacilityLocation: {
                    if (facilities.empty()) fail(ln, "facility_location needs facility lines");
                    Mat d(facilities.size(), ground);
                    Vec f1(facilities.size()), f2(facilities.size());
                    for (std::size_t i = 0; i < facilities.size(); ++i) {
                        d.row(i) = facilities[i].first.transpose();
                        f1[i] = facilities[i].second.first;
                        f2[i] = facilities[i].second.second;
                    }
                    inst.problem = std::make_shared<FacilityLocationProblem>(d, f1, f2);
                    break;
                }
                case ProblemFamily::Steiner: {
                    if (static_cast<int>(node_rows.size()) != ground + 1)
                        fail(ln, "steiner needs ground+1 node rows");
                    Mat d(ground + 1, ground + 1);
                    for (int i = 0; i <= ground; ++i)
                        for (int j = 0; j <= ground; ++j) d(i, j) = node_rows[i][j];
                    inst.problem = std::make_shared<SteinerProblem>(d, lambda.value_or(2.0));
                    break;
                }
            }
            have_problem = true;
        } else if (head == "metric") {
            if (toks.size() >= 2 && toks[1] == "discrete") {
                inst.metric = ScenarioMetric::discrete();
            } else if (toks.size() >= 2 && toks[1] == "asym_inf") {
                if (ground < 0) fail(ln, "'ground' must precede 'metric asym_inf'");
                std::optional<int> anchor;
                if (toks.size() == 4 && toks[2] == "anchor") anchor = integer(toks[3], ln);
                else if (toks.size() != 2) fail(ln, "expected 'metric asym_inf [anchor i]'");
                Mat base(ground, ground);
                for (int i = 0; i < ground; ++i) {
                    if (rd.done() || rd.peek()[0] != "row") fail(ln, "asym_inf needs 'row' lines");
                    int bln = rd.line_no();
                    auto b = rd.take();
                    if (static_cast<int>(b.size()) != ground + 1)
                        fail(bln, "row needs one value per element");
                    for (int j = 0; j < ground; ++j) base(i, j) = num(b[j + 1], bln);
                }
                if (rd.done() || rd.peek()[0] != "end") fail(ln, "metric block missing 'end'");
                rd.take();
                inst.metric = ScenarioMetric::asym_inf(base, anchor);
            } else {
                fail(ln, "expected 'metric discrete' or 'metric asym_inf'");
            }
        } else if (head == "ball") {
            if (toks.size() != 3) fail(ln, "expected 'ball {wasserstein|linf} r'");
            if (toks[1] == "wasserstein") inst.ball = BallMetric::Wasserstein;
            else if (toks[1] == "linf") inst.ball = BallMetric::Linf;
            else fail(ln, "unknown ball metric '" + toks[1] + "'");
            inst.radius = num(toks[2], ln);
            if (inst.radius < 0) fail(ln, "radius must be nonnegative");
            have_ball = true;
        } else if (head == "distribution") {
            if (ground < 0) fail(ln, "'ground' must precede 'distribution'");
            if (toks.size() != 2) fail(ln, "expected 'distribution {explicit|sampler}'");
            if (toks[1] == "explicit") {
                ExplicitDistribution d;
                while (!rd.done() && rd.peek()[0] != "end") {
                    int bln = rd.line_no();
                    auto b = rd.take();
                    auto colon = std::find(b.begin(), b.end(), ":");
                    if (b[0] != "scenario" || colon == b.end() || b.end() - colon != 2)
                        fail(bln, "expected 'scenario e... : prob'");
                    d.support.push_back(
                        scenario_of(b, 1, static_cast<std::size_t>(colon - b.begin()), ground, bln));
                    d.prob.push_back(num(*(colon + 1), bln));
                }
                if (rd.done()) fail(ln, "distribution block missing 'end'");
                rd.take();
                try {
                    d.validate();
                } catch (const Error& e) {
                    fail(ln, e.what());
                }
                inst.explicit_dist = std::move(d);
            } else if (toks[1] == "sampler") {
                if (rd.done() || rd.peek()[0] != "marginal")
                    fail(ln, "sampler needs a 'marginal' line");
                int bln = rd.line_no();
                auto b = rd.take();
                if (static_cast<int>(b.size()) != ground + 1)
                    fail(bln, "marginal needs one value per element");
                IndependentSampler s;
                for (int j = 0; j < ground; ++j) {
                    s.marginal.push_back(num(b[j + 1], bln));
                    if (s.marginal.back() < 0 || s.marginal.back() > 1)
                        fail(bln, "marginal out of [0,1]");
                }
                if (rd.done() || rd.peek()[0] != "end")
                    fail(ln, "distribution block missing 'end'");
                rd.take();
                inst.sampler = std::move(s);
            } else {
                fail(ln, "unknown distribution kind '" + toks[1] + "'");
            }
        } else {
            fail(ln, "unknown directive '" + head + "'");
        }
    }

    if (ground < 0) throw ParseError("missing 'ground' block");
    if (!have_problem) throw ParseError("missing 'problem' block");
    if (!have_ball) throw ParseError("missing 'ball' line");
    if (!inst.explicit_dist && !inst.sampler) throw ParseError("missing 'distribution' block");
    return inst;
}

Instance parse_instance_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_instance(ss.str());
}

std::string serialize_instance(const Instance& inst) {
    std::ostringstream os;
    const int ground = inst.problem->ground_size();
    os << "ground elements " << ground << "\n";
    os << "problem " << family_name(inst.family) << "\n";
    switch (inst.family) {
        case ProblemFamily::SetCover:
        case ProblemFamily::VertexCover:
        case ProblemFamily::EdgeCover: {
            auto& p = static_cast<const CoverProblem&>(*inst.problem);
            os << "lambda " << fmt(p.inflation()) << "\n";
            for (int s = 0; s < p.dim(); ++s) {
                os << "set";
                for (int e : Scenario(p.set_masks()[s]).members()) os << " " << e;
                os << " : " << fmt(p.first_stage_cost()[s]) << " "
                   << fmt(p.second_stage_cost()[s]) << "\n";
            }
            break;
        }
        case ProblemFamily::FacilityLocation: {
            auto& p = static_cast<const FacilityLocationProblem&>(*inst.problem);
            for (int i = 0; i < p.n_facilities(); ++i) {
                os << "facility " << fmt(p.first_stage_cost()[i]) << " "
                   << fmt(p.stage2_open_cost()[i]) << " :";
                for (int j = 0; j < p.n_clients(); ++j) os << " " << fmt(p.dist(i, j));
                os << "\n";
            }
            break;
        }
        case ProblemFamily::Steiner: {
            auto& p = static_cast<const SteinerProblem&>(*inst.problem);
            os << "lambda " << fmt(p.inflation()) << "\n";
            for (int i = 0; i < p.n_nodes(); ++i) {
                os << "node";
                for (int j = 0; j < p.n_nodes(); ++j) os << " " << fmt(p.node_distances()(i, j));
                os << "\n";
            }
            break;
        }
    }
    os << "end\n";

    if (inst.metric.kind() == MetricKind::Discrete) {
        os << "metric discrete\n";
    } else {
        os << "metric asym_inf";
        if (inst.metric.anchor()) os << " anchor " << *inst.metric.anchor();
        os << "\n";
        for (int i = 0; i < ground; ++i) {
            os << "row";
            for (int j = 0; j < ground; ++j) os << " " << fmt(inst.metric.base_distances()(i, j));
            os << "\n";
        }
        os << "end\n";
    }

    os << "ball " << (inst.ball == BallMetric::Wasserstein ? "wasserstein" : "linf") << " "
       << fmt(inst.radius) << "\n";

    if (inst.explicit_dist) {
        os << "distribution explicit\n";
        for (std::size_t i = 0; i < inst.explicit_dist->support.size(); ++i) {
            os << "scenario";
            for (int e : inst.explicit_dist->support[i].members()) os << " " << e;
            os << " : " << fmt(inst.explicit_dist->prob[i]) << "\n";
        }
        os << "end\n";
    } else if (inst.sampler) {
        os << "distribution sampler\n";
        os << "marginal";
        for (double m : inst.sampler->marginal) os << " " << fmt(m);
        os << "\nend\n";
    }
    return os.str();
}

namespace {

// Round to 4 decimals so generated files stay short and round-trip exactly.
double snap(double v) { return std::round(v * 10000.0) / 10000.0; }

ExplicitDistribution random_support(std::mt19937_64& rng, int ground, int k) {
    std::uniform_real_distribution<double> U(0.05, 1.0);
    ExplicitDistribution d;
    std::uint64_t full = (1ULL << ground) - 1;
    while (static_cast<int>(d.support.size()) < k) {
        Scenario s(rng() % (full + 1));
        bool dup = false;
        for (Scenario t : d.support) dup |= t == s;
        if (!dup) {
            d.support.push_back(s);
            d.prob.push_back(snap(U(rng)));
        }
    }
    double total = 0.0;
    for (double w : d.prob) total += w;
    for (std::size_t i = 0; i + 1 < d.prob.size(); ++i) d.prob[i] = snap(d.prob[i] / total);
    double head = 0.0;
    for (std::size_t i = 0; i + 1 < d.prob.size(); ++i) head += d.prob[i];
    d.prob.back() = snap(1.0 - head);
    return d;
}

Mat random_points_metric(std::mt19937_64& rng, int rows, int cols, bool square) {
    std::uniform_real_distribution<double> U(0.0, 10.0);
    std::vector<std::pair<double, double>> a(rows), b(cols);
    for (auto& p : a) p = {U(rng), U(rng)};
    if (square) b = a;
    else
        for (auto& p : b) p = {U(rng), U(rng)};
    Mat d(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            d(i, j) = snap(std::hypot(a[i].first - b[j].first, a[i].second - b[j].second));
    return d;
}

}  // namespace

Instance generate_instance(ProblemFamily family, const GenParams& params, std::uint64_t seed) {
    std::mt19937_64 rng(split_seed(seed, 0x9e3779b97f4a7c15ULL));
    std::uniform_real_distribution<double> U(0.5, 3.0);
    Instance inst;
    inst.family = family;

    int ground = params.large ? params.ground : std::min(params.ground, 8);
    int actions = params.large ? params.actions : std::min(params.actions, 10);

    switch (family) {
        case ProblemFamily::SetCover: {
            std::vector<std::uint64_t> masks(actions);
            std::uint64_t full = (1ULL << ground) - 1, covered = 0;
            for (int s = 0; s < actions; ++s) {
                masks[s] = 1 + rng() % full;
                covered |= masks[s];
            }
            masks[0] |= full & ~covered;
            Vec c1(actions), c2(actions);
            for (int s = 0; s < actions; ++s) {
                c1[s] = snap(U(rng));
                c2[s] = snap(c1[s] * (1.0 + U(rng)));
            }
            inst.problem = std::make_shared<CoverProblem>(CoverProblem::Family::SetCover, ground,
                                                          masks, c1, c2);
            break;
        }
        case ProblemFamily::VertexCover: {
            // `actions` vertices; ground elements are random edges between them.
            int v = std::max(actions, 2);
            std::vector<std::uint64_t> masks(v, 0);
            for (int e = 0; e < ground; ++e) {
                int a = static_cast<int>(rng() % v);
                int b = static_cast<int>(rng() % (v - 1));
                if (b >= a) ++b;
                masks[a] |= 1ULL << e;
                masks[b] |= 1ULL << e;
            }
            Vec c1(v), c2(v);
            for (int s = 0; s < v; ++s) {
                c1[s] = snap(U(rng));
                c2[s] = snap(c1[s] * (1.0 + U(rng)));
            }
            inst.problem = std::make_shared<CoverProblem>(CoverProblem::Family::VertexCover,
                                                          ground, masks, c1, c2);
            break;
        }
        case ProblemFamily::EdgeCover: {
            // Ground elements are vertices; sets are edges of a connected graph.
            std::vector<std::uint64_t> masks;
            for (int u = 1; u < ground; ++u) {
                int v = static_cast<int>(rng() % u);
                masks.push_back((1ULL << u) | (1ULL << v));
            }
            for (int extra = 0; extra < actions - ground + 1; ++extra) {
                int a = static_cast<int>(rng() % ground);
                int b = static_cast<int>(rng() % ground);
                if (a != b) masks.push_back((1ULL << a) | (1ULL << b));
            }
            Vec c1(masks.size()), c2(masks.size());
            for (std::size_t s = 0; s < masks.size(); ++s) {
                c1[s] = snap(U(rng));
                c2[s] = snap(c1[s] * (1.0 + U(rng)));
            }
            inst.problem = std::make_shared<CoverProblem>(CoverProblem::Family::EdgeCover, ground,
                                                          masks, c1, c2);
            break;
        }
        case ProblemFamily::FacilityLocation: {
            Mat d = random_points_metric(rng, actions, ground, false);
            Vec f1(actions), f2(actions);
            for (int i = 0; i < actions; ++i) {
                f1[i] = snap(U(rng));
                f2[i] = snap(f1[i] * (1.0 + U(rng)));
            }
            inst.problem = std::make_shared<FacilityLocationProblem>(d, f1, f2);
            break;
        }
        case ProblemFamily::Steiner: {
            Mat d = random_points_metric(rng, ground + 1, ground + 1, true);
            for (int i = 0; i <= ground; ++i) d(i, i) = 0.0;
            inst.problem = std::make_shared<SteinerProblem>(d, snap(1.0 + U(rng)));
            break;
        }
    }

    inst.metric = ScenarioMetric::discrete();
    inst.ball = BallMetric::Wasserstein;
    inst.radius = snap(0.05 + 0.4 * (rng() % 1000) / 1000.0);
    inst.explicit_dist = random_support(rng, inst.problem->ground_size(),
                                        2 + static_cast<int>(rng() % 2));
    return inst;
}

std::string content_hash(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace drts
