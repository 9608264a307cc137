#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "navsim/episodes.hpp"
#include "navsim/llm_client.hpp"
#include "navsim/metrics.hpp"
#include "navsim/navigator.hpp"
#include "navsim/perception.hpp"
#include "navsim/waypoint.hpp"
#include "navsim/world.hpp"

namespace navsim {

struct RunConfig {
    std::string map_path;      // file path, or "demo" for the built-in map
    std::string episodes_path; // empty when synthetic
    bool synthetic = false;
    int synthetic_n = 20;
    uint64_t seed = 7;

    BackendConfig backend;
    RetryPolicy retry;     // transport retries per chat call
    int parse_retries = 3; // chat re-asks per stage before the fallback

    int k_waypoints = 5;
    int max_steps = 20;
    double success_radius = 3.0; // used by the synthetic generator
    double agent_radius = kDefaultAgentRadius;
    WaypointParams waypoint;

    int parallelism = 1;
    std::string out_dir;       // empty: no files written
    double log_substep = 0.25; // trajectory sampling along each move
    bool dump_heatmaps = false;
};

// Comprehension happens once per episode; prompts and raw responses are
// kept verbatim.
struct ComprehensionRecord {
    std::string action_prompt;
    std::string landmark_prompt;
    std::vector<std::string> action_responses;
    std::vector<std::string> landmark_responses;
    Decomposition parsed;
    bool action_fallback = false;
    bool landmark_fallback = false;
};

struct StepRecord {
    int step = 0;
    Pose2D pose; // before the move
    std::vector<Waypoint> candidates;
    std::map<std::string, std::string> prompts;                // stage -> prompt
    std::map<std::string, std::vector<std::string>> responses; // stage -> attempts
    ProgressEstimate progress;
    bool progress_fallback = false;
    NavDecision decision;
    std::optional<Waypoint> executed; // angle + distance actually moved
    std::vector<Vec2> positions;      // dense samples after the pre-move pose
    std::optional<Heatmap> heatmap;   // with dump_heatmaps only
};

struct TrajectoryLog {
    std::string episode_id;
    Episode source; // copy of the episode the log was produced from
    ComprehensionRecord comprehension;
    std::vector<StepRecord> steps; // one record per decision made
    Trajectory trajectory;         // start pose + all step positions
    MetricsReport report;
    double shortest_geodesic = 0.0;
    std::string stop_reason;     // stop | max_steps | no_candidates | transport_error | error
    std::string transport_error; // empty when completed
    bool completed = false;
};

// Full pipeline for one episode: propose waypoints, observe, textualize,
// three-stage reasoning, clamped motion; deterministic for the offline
// backends. Transport errors abort the episode but are captured in the log
// rather than thrown.
TrajectoryLog run_episode(const WorldMap& map, const VisibilityGraph& graph,
                          const Episode& episode, const RunConfig& cfg, Backend& backend);

struct BatchResult {
    AggregateReport aggregate;
    std::vector<TrajectoryLog> logs;
    std::vector<std::string> failed_ids; // transport failures

    bool all_completed() const { return failed_ids.empty(); }
};

// Runs every episode with bounded parallelism. With out_dir set, writes one
// JSONL log per episode plus report.json and report.txt.
BatchResult run_batch(const RunConfig& cfg);

// Same, for a caller-provided map and episode list.
BatchResult run_batch(const RunConfig& cfg, const WorldMap& map, const EpisodeSet& episodes);

// --- trajectory log files ----------------------------------------------------

// One JSON object per line: comprehension, then step records, final line the
// report (positions, reference path, and scoring inputs included so logs can
// be re-scored without the map).
void write_trajectory_log(const TrajectoryLog& log, const std::string& path);

struct RescoredLog {
    std::string episode_id;
    MetricsReport stored;
    MetricsReport recomputed;
    bool completed = false;

    bool matches_bitwise() const;
};

// Re-scores the positions stored in a log file against its stored reference
// path and scoring inputs.
RescoredLog rescore_log(const std::string& path);

std::string aggregate_to_json(const BatchResult& result);
std::string aggregate_table(const AggregateReport& agg);

} // namespace navsim
