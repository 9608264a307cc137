#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "navsim/world.hpp"

namespace navsim {

struct Episode {
    std::string id;
    std::string instruction;
    Pose2D start;
    Vec2 goal;
    std::vector<Vec2> reference_path; // start .. goal, polyline
    double success_radius = 3.0;      // meters
};

struct EpisodeSet {
    std::vector<Episode> episodes;
    std::string map_ref; // identifier of the WorldMap file
};

// Spacing used when densifying generated reference paths. Generated paths
// carry a point every kReferenceStep meters so path-fidelity scoring has a
// usable resolution.
inline constexpr double kReferenceStep = 0.25;

// Insert intermediate points so consecutive points are at most `step` apart.
std::vector<Vec2> densify_polyline(const std::vector<Vec2>& points, double step);

double polyline_length(const std::vector<Vec2>& points);

// --- file io ---------------------------------------------------------------

// Parses and validates against the map: unique ids, path endpoints matching
// start/goal, every consecutive segment collision-clear at agent_radius,
// positive success radius. Throws ParseError / ValidationError (the latter
// names the offending episode id).
EpisodeSet load_episodes(const std::string& path, const WorldMap& map,
                         double agent_radius = kDefaultAgentRadius);
EpisodeSet episodes_from_json_text(const std::string& text, const WorldMap& map,
                                   double agent_radius = kDefaultAgentRadius);
void save_episodes(const EpisodeSet& set, const std::string& path);
std::string episodes_to_json_text(const EpisodeSet& set);

// --- synthetic generation ----------------------------------------------------

struct GeneratorParams {
    double agent_radius = kDefaultAgentRadius;
    double success_radius = 3.0;
    // Path length window, matching typical indoor instruction-following
    // routes; the lower bound keeps "stop immediately" from ever winning.
    double min_geodesic = 6.0;
    double max_geodesic = 12.0;
    int max_attempts_per_episode = 400;
};

// Deterministic pure function of (map, seed, n): templated instructions
// grounded on objects within 2 m of the reference path, reference paths are
// densified shortest paths, start heading faces the first path segment.
// Throws ValidationError if the map has fewer than 2 labelled objects or is
// too obstructed to place the requested episodes.
EpisodeSet generate_synthetic(const WorldMap& map, uint64_t seed, int n,
                              const GeneratorParams& params = {});

} // namespace navsim
