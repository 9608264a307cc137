#include "navsim/episodes.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "navsim/errors.hpp"
#include "navsim/rng.hpp"

namespace navsim {

namespace {

using json = nlohmann::json;

constexpr double kLandmarkRange = 2.0; // max object-to-path distance for grounding

std::string format_meters(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.0f", v);
    return buf;
}

} // namespace

std::vector<Vec2> densify_polyline(const std::vector<Vec2>& points, double step) {
    if (points.size() < 2 || step <= 0.0) return points;
    std::vector<Vec2> out;
    out.push_back(points.front());
    for (size_t i = 1; i < points.size(); ++i) {
        Vec2 a = points[i - 1];
        Vec2 b = points[i];
        double len = distance(a, b);
        int pieces = std::max(1, static_cast<int>(std::ceil(len / step)));
        for (int k = 1; k <= pieces; ++k) {
            out.push_back(a + (b - a) * (static_cast<double>(k) / pieces));
        }
    }
    return out;
}

double polyline_length(const std::vector<Vec2>& points) {
    double acc = 0.0;
    for (size_t i = 1; i < points.size(); ++i) acc += distance(points[i - 1], points[i]);
    return acc;
}

// --- file io -----------------------------------------------------------------

namespace {

void validate_episode(const Episode& ep, const WorldMap& map, double agent_radius) {
    auto fail = [&](const std::string& what) {
        throw ValidationError("episode '" + ep.id + "': " + what);
    };
    if (ep.id.empty()) throw ValidationError("episode with empty id");
    if (ep.instruction.empty()) fail("empty instruction");
    if (!(ep.success_radius > 0.0)) fail("success_radius must be positive");
    if (ep.reference_path.size() < 2) fail("reference path needs at least 2 points");
    if (distance(ep.reference_path.front(), ep.start.position) > 1e-6)
        fail("reference path does not start at the start pose");
    if (distance(ep.reference_path.back(), ep.goal) > 1e-6)
        fail("reference path does not end at the goal");
    if (!map.bounds.contains(ep.goal)) fail("goal outside map bounds");
    for (size_t i = 1; i < ep.reference_path.size(); ++i) {
        if (!segment_clear(map, ep.reference_path[i - 1], ep.reference_path[i], agent_radius))
            fail("reference path segment " + std::to_string(i - 1) +
                 " is not collision-clear at agent radius");
    }
}

} // namespace

EpisodeSet episodes_from_json_text(const std::string& text, const WorldMap& map,
                                   double agent_radius) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("episode JSON: ") + e.what());
    }
    EpisodeSet set;
    try {
        set.map_ref = j.value("map_ref", "");
        for (const auto& e : j.at("episodes")) {
            Episode ep;
            ep.id = e.at("id").get<std::string>();
            ep.instruction = e.at("instruction").get<std::string>();
            const auto& s = e.at("start");
            ep.start = Pose2D::make(s.at("x").get<double>(), s.at("y").get<double>(),
                                    s.at("heading").get<double>());
            ep.goal = {e.at("goal").at(0).get<double>(), e.at("goal").at(1).get<double>()};
            for (const auto& p : e.at("reference_path")) {
                ep.reference_path.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
            }
            ep.success_radius = e.at("success_radius").get<double>();
            set.episodes.push_back(std::move(ep));
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("episode JSON: ") + e.what());
    }

    std::vector<std::string> ids;
    for (const auto& ep : set.episodes) ids.push_back(ep.id);
    std::sort(ids.begin(), ids.end());
    auto dup = std::adjacent_find(ids.begin(), ids.end());
    if (dup != ids.end()) throw ValidationError("duplicate episode id: " + *dup);

    for (const auto& ep : set.episodes) validate_episode(ep, map, agent_radius);
    return set;
}

EpisodeSet load_episodes(const std::string& path, const WorldMap& map, double agent_radius) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open episode file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return episodes_from_json_text(ss.str(), map, agent_radius);
}

std::string episodes_to_json_text(const EpisodeSet& set) {
    json j;
    j["map_ref"] = set.map_ref;
    j["episodes"] = json::array();
    for (const auto& ep : set.episodes) {
        json path = json::array();
        for (const auto& p : ep.reference_path) path.push_back({p.x, p.y});
        j["episodes"].push_back({{"id", ep.id},
                                 {"instruction", ep.instruction},
                                 {"start",
                                  {{"x", ep.start.position.x},
                                   {"y", ep.start.position.y},
                                   {"heading", ep.start.heading}}},
                                 {"goal", {ep.goal.x, ep.goal.y}},
                                 {"reference_path", path},
                                 {"success_radius", ep.success_radius}});
    }
    return j.dump(2) + "\n";
}

void save_episodes(const EpisodeSet& set, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write episode file: " + path);
    out << episodes_to_json_text(set);
}

// --- synthetic generation ------------------------------------------------------

namespace {

struct PathLandmark {
    std::string label;
    Vec2 position;
    double arc = 0.0;  // arc position of the closest polyline point
    double dist = 0.0; // distance to the polyline
};

std::vector<PathLandmark> landmarks_near_path(const WorldMap& map,
                                              const std::vector<Vec2>& dense_path) {
    std::vector<PathLandmark> found;
    for (const auto& obj : map.objects) {
        double best = std::numeric_limits<double>::infinity();
        double best_arc = 0.0;
        double arc = 0.0;
        for (size_t i = 1; i < dense_path.size(); ++i) {
            double d = point_segment_distance(obj.position, dense_path[i - 1], dense_path[i]);
            if (d < best) {
                best = d;
                best_arc = arc;
            }
            arc += distance(dense_path[i - 1], dense_path[i]);
        }
        if (best <= kLandmarkRange) found.push_back({obj.label, obj.position, best_arc, best});
    }
    std::sort(found.begin(), found.end(),
              [](const PathLandmark& a, const PathLandmark& b) { return a.arc < b.arc; });
    // Keep the first occurrence of each label so instructions stay unambiguous.
    std::vector<PathLandmark> unique;
    for (auto& lm : found) {
        bool seen = std::any_of(unique.begin(), unique.end(),
                                [&](const PathLandmark& u) { return u.label == lm.label; });
        if (!seen) unique.push_back(std::move(lm));
    }
    return unique;
}

struct Corner {
    Vec2 position;
    double turn = 0.0; // signed turn angle, CCW positive
    double arc = 0.0;
};

std::vector<Corner> path_corners(const std::vector<Vec2>& sparse_path) {
    std::vector<Corner> corners;
    double arc = 0.0;
    for (size_t i = 1; i + 1 < sparse_path.size(); ++i) {
        arc += distance(sparse_path[i - 1], sparse_path[i]);
        Vec2 in_dir = sparse_path[i] - sparse_path[i - 1];
        Vec2 out_dir = sparse_path[i + 1] - sparse_path[i];
        double turn = wrap_to_pi(std::atan2(out_dir.y, out_dir.x) - std::atan2(in_dir.y, in_dir.x));
        if (std::abs(turn) >= 20.0 * kPi / 180.0) {
            corners.push_back({sparse_path[i], turn, arc});
        }
    }
    return corners;
}

std::string compose_instruction(Rng& rng, const std::vector<PathLandmark>& landmarks,
                                const std::vector<Corner>& corners, Vec2 goal,
                                double total_length, bool* used_landmark) {
    *used_landmark = false;
    std::vector<std::string> clauses;
    std::vector<size_t> used;

    auto take_landmark_near_arc = [&](double arc, double window) -> const PathLandmark* {
        size_t best_i = landmarks.size();
        double best_gap = window;
        for (size_t i = 0; i < landmarks.size(); ++i) {
            if (std::find(used.begin(), used.end(), i) != used.end()) continue;
            double gap = std::abs(landmarks[i].arc - arc);
            if (gap <= best_gap) {
                best_gap = gap;
                best_i = i;
            }
        }
        if (best_i == landmarks.size()) return nullptr;
        used.push_back(best_i);
        return &landmarks[best_i];
    };

    // Opening clause.
    const PathLandmark* first = nullptr;
    if (!landmarks.empty() && landmarks.front().arc < 0.6 * total_length) {
        first = &landmarks.front();
        used.push_back(0);
    }
    if (first) {
        *used_landmark = true;
        static const std::vector<std::string> openers = {"Walk past the ", "Head toward the ",
                                                         "Go straight toward the "};
        clauses.push_back(rng.pick(openers) + first->label);
    } else {
        static const std::vector<std::string> openers = {"Walk straight ahead",
                                                         "Move forward along the open space"};
        clauses.push_back(rng.pick(openers));
    }

    // Up to two turn clauses.
    size_t n_turns = std::min<size_t>(corners.size(), 2);
    for (size_t c = 0; c < n_turns; ++c) {
        const Corner& corner = corners[c];
        std::string dir = corner.turn > 0.0 ? "left" : "right";
        std::string clause = "then turn " + dir;
        if (const PathLandmark* lm = take_landmark_near_arc(corner.arc, 2.0)) {
            clause += " at the " + lm->label;
            *used_landmark = true;
        }
        clauses.push_back(clause);
    }

    // Closing clause.
    const PathLandmark* near_goal = nullptr;
    for (size_t i = 0; i < landmarks.size(); ++i) {
        if (std::find(used.begin(), used.end(), i) != used.end()) continue;
        if (distance(landmarks[i].position, goal) <= 2.5) {
            near_goal = &landmarks[i];
            used.push_back(i);
            break;
        }
    }
    if (near_goal) {
        *used_landmark = true;
        clauses.push_back("and stop near the " + near_goal->label);
    } else {
        clauses.push_back("and stop after about " + format_meters(total_length) + " meters");
    }

    std::string text;
    for (size_t i = 0; i < clauses.size(); ++i) {
        if (i > 0) text += ", ";
        text += clauses[i];
    }
    text += ".";
    return text;
}

} // namespace

EpisodeSet generate_synthetic(const WorldMap& map, uint64_t seed, int n,
                              const GeneratorParams& params) {
    int labelled = 0;
    for (const auto& obj : map.objects) {
        if (!obj.label.empty()) ++labelled;
    }
    if (labelled < 2) throw ValidationError("synthetic generation needs at least 2 labelled objects");

    EpisodeSet set;
    if (n <= 0) return set;

    VisibilityGraph graph(map, params.agent_radius);
    Rng rng(mix_seed(seed));
    double margin = params.agent_radius + 0.05;

    auto sample_position = [&]() -> std::optional<Vec2> {
        for (int tries = 0; tries < 50; ++tries) {
            Vec2 p{rng.uniform(map.bounds.min_x + margin, map.bounds.max_x - margin),
                   rng.uniform(map.bounds.min_y + margin, map.bounds.max_y - margin)};
            if (position_clear(map, p, params.agent_radius)) return p;
        }
        return std::nullopt;
    };

    for (int i = 0; i < n; ++i) {
        bool placed = false;
        for (int attempt = 0; attempt < params.max_attempts_per_episode && !placed; ++attempt) {
            auto start = sample_position();
            auto goal = sample_position();
            if (!start || !goal) continue;

            std::vector<Vec2> sparse;
            double length = 0.0;
            try {
                sparse = graph.path(*start, *goal);
                length = polyline_length(sparse);
            } catch (const UnreachableError&) {
                continue;
            }
            if (length < params.min_geodesic || length > params.max_geodesic) continue;

            std::vector<Vec2> dense = densify_polyline(sparse, kReferenceStep);
            auto landmarks = landmarks_near_path(map, dense);
            if (landmarks.empty()) continue;

            auto corners = path_corners(sparse);
            bool used_landmark = false;
            std::string instruction =
                compose_instruction(rng, landmarks, corners, *goal, length, &used_landmark);
            if (!used_landmark) continue;

            Episode ep;
            char id[32];
            std::snprintf(id, sizeof(id), "syn%llu-%03d", static_cast<unsigned long long>(seed), i);
            ep.id = id;
            ep.instruction = instruction;
            double heading = std::atan2(dense[1].y - dense[0].y, dense[1].x - dense[0].x);
            ep.start = Pose2D::make(start->x, start->y, heading);
            ep.goal = *goal;
            ep.reference_path = std::move(dense);
            ep.success_radius = params.success_radius;
            set.episodes.push_back(std::move(ep));
            placed = true;
        }
        if (!placed)
            throw ValidationError("map too small or obstructed to place episode " +
                                  std::to_string(i));
    }
    return set;
}

} // namespace navsim
