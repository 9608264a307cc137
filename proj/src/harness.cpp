#include "navsim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "navsim/errors.hpp"
#include "navsim/rng.hpp"

namespace navsim {

namespace {

using json = nlohmann::json;

// Re-asks the backend until the parser accepts, up to cfg.parse_retries
// attempts. Returns nullopt when every attempt fails to parse; transport
// errors propagate.
template <typename Parser>
auto ask_and_parse(Backend& backend, const RunConfig& cfg, const std::string& prompt,
                   std::vector<std::string>& raw_out, Parser&& parser)
    -> decltype(parser(std::string{})) {
    for (int attempt = 0; attempt < cfg.parse_retries; ++attempt) {
        std::string reply = chat(backend, {{Role::User, prompt}}, cfg.retry);
        raw_out.push_back(reply);
        if (auto parsed = parser(reply)) return parsed;
    }
    return std::nullopt;
}

ComprehensionRecord comprehend(Backend& backend, const RunConfig& cfg,
                               const std::string& instruction) {
    ComprehensionRecord rec;
    rec.action_prompt = build_comprehension_prompt(instruction, DecompositionKind::Actions);
    rec.landmark_prompt = build_comprehension_prompt(instruction, DecompositionKind::Landmarks);

    auto actions = ask_and_parse(backend, cfg, rec.action_prompt, rec.action_responses,
                                 [](const std::string& s) { return parse_decomposition(s); });
    if (actions) {
        rec.parsed.actions = *actions;
    } else {
        rec.parsed.actions = {instruction};
        rec.action_fallback = true;
    }

    auto landmarks = ask_and_parse(backend, cfg, rec.landmark_prompt, rec.landmark_responses,
                                   [](const std::string& s) { return parse_decomposition(s); });
    if (landmarks) {
        rec.parsed.landmarks = *landmarks;
    } else {
        rec.parsed.landmarks = {instruction};
        rec.landmark_fallback = true;
    }
    return rec;
}

void append_move_samples(std::vector<Vec2>& out, Vec2 from, Vec2 to, double step) {
    double len = distance(from, to);
    if (len <= 0.0) return;
    int pieces = std::max(1, static_cast<int>(std::ceil(len / std::max(step, 1e-6))));
    for (int k = 1; k <= pieces; ++k) {
        out.push_back(from + (to - from) * (static_cast<double>(k) / pieces));
    }
}

json heatmap_to_json(const Heatmap& h) {
    return {{"num_sectors", h.num_sectors},
            {"num_bins", h.num_bins},
            {"min_distance", h.min_distance},
            {"max_distance", h.max_distance},
            {"scores", h.scores}};
}

} // namespace

TrajectoryLog run_episode(const WorldMap& map, const VisibilityGraph& graph,
                          const Episode& episode, const RunConfig& cfg, Backend& backend) {
    TrajectoryLog log;
    log.episode_id = episode.id;
    log.source = episode;
    log.trajectory.points.push_back(episode.start.position);

    Pose2D pose = episode.start;
    std::string history;

    try {
        log.shortest_geodesic = graph.distance(episode.start.position, episode.goal);
        log.comprehension = comprehend(backend, cfg, episode.instruction);
        const Decomposition& decomp = log.comprehension.parsed;
        int n_actions = static_cast<int>(decomp.actions.size());

        for (int step = 0; step < cfg.max_steps; ++step) {
            StepRecord rec;
            rec.step = step;
            rec.pose = pose;

            rec.candidates =
                propose_waypoints(map, pose, cfg.agent_radius, cfg.k_waypoints, cfg.waypoint);
            if (cfg.dump_heatmaps) {
                rec.heatmap = smooth_heatmap(build_heatmap(map, pose, cfg.agent_radius, cfg.waypoint));
            }
            if (rec.candidates.empty()) {
                // No decision was made, so no step record is kept.
                log.stop_reason = "no_candidates";
                break;
            }

            SceneObservation obs = observe(map, pose, rec.candidates);
            std::vector<SceneDescription> descs = textualize(obs);

            backend.on_step({pose, rec.candidates});

            PromptContext ctx;
            ctx.instruction = episode.instruction;
            ctx.decomposition = decomp;
            ctx.history_summary = history;
            ctx.candidate_descriptions = descs;
            ctx.step_index = step;

            std::string progress_prompt = build_progress_prompt(ctx);
            rec.prompts["progress"] = progress_prompt;
            auto progress =
                ask_and_parse(backend, cfg, progress_prompt, rec.responses["progress"],
                              [&](const std::string& s) { return parse_progress(s, n_actions); });
            if (progress) {
                rec.progress = *progress;
            } else {
                rec.progress = ProgressEstimate::all_pending(n_actions, "parse fallback");
                rec.progress_fallback = true;
            }
            ctx.progress = rec.progress;

            std::string decision_prompt = build_decision_prompt(ctx);
            rec.prompts["decision"] = decision_prompt;
            int n_candidates = static_cast<int>(rec.candidates.size());
            auto decision =
                ask_and_parse(backend, cfg, decision_prompt, rec.responses["decision"],
                              [&](const std::string& s) { return parse_decision(s, n_candidates); });
            rec.decision = decision ? *decision : decide_fallback(rec.candidates);

            if (rec.decision.is_stop()) {
                log.stop_reason = "stop";
                log.steps.push_back(std::move(rec));
                break;
            }

            int choice = *rec.decision.choice;
            const Waypoint& wp = rec.candidates[choice];
            Pose2D next = move_along(map, pose, wp, cfg.agent_radius);
            double moved = distance(next.position, pose.position);
            rec.executed = Waypoint{wp.angle, moved};
            append_move_samples(rec.positions, pose.position, next.position, cfg.log_substep);
            for (const auto& p : rec.positions) log.trajectory.points.push_back(p);

            history = summarize_step(history, step, rec.decision, *rec.executed,
                                     obs.entries[static_cast<size_t>(choice)]);
            pose = next;
            log.steps.push_back(std::move(rec));
        }
        if (log.stop_reason.empty()) log.stop_reason = "max_steps";

        log.report = compute_report(log.trajectory, episode.reference_path, episode.goal,
                                    episode.success_radius, log.shortest_geodesic,
                                    episode.success_radius);
        log.completed = true;
    } catch (const TransportError& e) {
        log.stop_reason = "transport_error";
        log.transport_error = e.what();
        log.completed = false;
    } catch (const Error& e) {
        // Bad episode data (for instance an unreachable goal) is contained
        // the same way so one episode cannot abort the batch.
        log.stop_reason = "error";
        log.transport_error = e.what();
        log.completed = false;
    }
    return log;
}

// --- batch ---------------------------------------------------------------------

namespace {

std::string sanitize_filename(const std::string& id) {
    std::string out = id;
    for (char& c : out) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
    }
    return out;
}

} // namespace

BatchResult run_batch(const RunConfig& cfg, const WorldMap& map, const EpisodeSet& episodes) {
    cfg.backend.validate();
    VisibilityGraph graph(map, cfg.agent_radius);

    // The http backend is shared (it enforces its own in-flight cap); the
    // offline kinds get one instance per episode so their state stays
    // episode-local.
    std::shared_ptr<Backend> shared;
    if (cfg.backend.kind == BackendKind::Http) {
        shared = make_backend(cfg.backend, nullptr, nullptr, cfg.agent_radius);
    }

    size_t n = episodes.episodes.size();
    std::vector<TrajectoryLog> logs(n);
    std::atomic<size_t> cursor{0};
    int workers = std::max(1, std::min<int>(cfg.parallelism, static_cast<int>(std::max<size_t>(n, 1))));

    auto work = [&]() {
        while (true) {
            size_t i = cursor.fetch_add(1);
            if (i >= n) break;
            const Episode& ep = episodes.episodes[i];
            if (shared) {
                logs[i] = run_episode(map, graph, ep, cfg, *shared);
            } else {
                BackendConfig per = cfg.backend;
                if (per.kind == BackendKind::Random) {
                    per.seed = mix_seed(cfg.backend.seed ^ fnv1a(ep.id));
                }
                auto backend = make_backend(per, &map, &ep, cfg.agent_radius);
                logs[i] = run_episode(map, graph, ep, cfg, *backend);
            }
        }
    };

    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    BatchResult result;
    std::vector<MetricsReport> reports;
    for (auto& log : logs) {
        if (log.completed) {
            reports.push_back(log.report);
        } else {
            result.failed_ids.push_back(log.episode_id);
        }
    }
    if (!reports.empty()) result.aggregate = aggregate(reports);
    result.aggregate.count = static_cast<int>(reports.size());
    result.logs = std::move(logs);

    if (!cfg.out_dir.empty()) {
        std::filesystem::create_directories(cfg.out_dir);
        for (const auto& log : result.logs) {
            write_trajectory_log(log,
                                 cfg.out_dir + "/" + sanitize_filename(log.episode_id) + ".jsonl");
        }
        std::ofstream js(cfg.out_dir + "/report.json");
        js << aggregate_to_json(result);
        std::ofstream txt(cfg.out_dir + "/report.txt");
        txt << aggregate_table(result.aggregate);
    }
    return result;
}

BatchResult run_batch(const RunConfig& cfg) {
    WorldMap map = cfg.map_path == "demo" ? make_demo_map() : load_map(cfg.map_path);
    EpisodeSet episodes;
    if (cfg.synthetic) {
        GeneratorParams gp;
        gp.agent_radius = cfg.agent_radius;
        gp.success_radius = cfg.success_radius;
        episodes = generate_synthetic(map, cfg.seed, cfg.synthetic_n, gp);
        episodes.map_ref = cfg.map_path;
    } else {
        episodes = load_episodes(cfg.episodes_path, map, cfg.agent_radius);
    }
    return run_batch(cfg, map, episodes);
}

// --- log files --------------------------------------------------------------------

namespace {

json vec2_json(Vec2 v) { return json::array({v.x, v.y}); }

json waypoint_json(const Waypoint& wp) {
    return {{"angle", wp.angle}, {"distance", wp.distance}};
}

json metrics_json(const MetricsReport& m) {
    return {{"tl", m.tl},   {"ne", m.ne},   {"sr", m.sr},
            {"osr", m.osr}, {"spl", m.spl}, {"ndtw", m.ndtw}};
}

MetricsReport metrics_from_json(const json& j) {
    MetricsReport m;
    m.tl = j.at("tl").get<double>();
    m.ne = j.at("ne").get<double>();
    m.sr = j.at("sr").get<double>();
    m.osr = j.at("osr").get<double>();
    m.spl = j.at("spl").get<double>();
    m.ndtw = j.at("ndtw").get<double>();
    return m;
}

} // namespace

void write_trajectory_log(const TrajectoryLog& log, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write trajectory log: " + path);

    json comp{{"type", "comprehension"},
              {"prompts",
               {{"actions", log.comprehension.action_prompt},
                {"landmarks", log.comprehension.landmark_prompt}}},
              {"responses",
               {{"actions", log.comprehension.action_responses},
                {"landmarks", log.comprehension.landmark_responses}}},
              {"parsed",
               {{"actions", log.comprehension.parsed.actions},
                {"landmarks", log.comprehension.parsed.landmarks}}},
              {"fallback",
               {{"actions", log.comprehension.action_fallback},
                {"landmarks", log.comprehension.landmark_fallback}}}};
    out << comp.dump() << "\n";

    for (const auto& rec : log.steps) {
        json step{{"type", "step"},
                  {"step", rec.step},
                  {"pose",
                   {{"x", rec.pose.position.x},
                    {"y", rec.pose.position.y},
                    {"heading", rec.pose.heading}}},
                  {"prompts", rec.prompts},
                  {"responses", rec.responses},
                  {"progress_fallback", rec.progress_fallback}};
        step["candidates"] = json::array();
        for (const auto& wp : rec.candidates) step["candidates"].push_back(waypoint_json(wp));
        step["decision"] = {{"choice", rec.decision.is_stop() ? json("STOP") : json(*rec.decision.choice)},
                            {"thought", rec.decision.thought},
                            {"fallback_used", rec.decision.fallback_used}};
        step["executed"] = rec.executed ? waypoint_json(*rec.executed) : json(nullptr);
        step["positions"] = json::array();
        for (const auto& p : rec.positions) step["positions"].push_back(vec2_json(p));
        if (rec.heatmap) step["heatmap"] = heatmap_to_json(*rec.heatmap);
        out << step.dump() << "\n";
    }

    json report{{"type", "report"},
                {"episode_id", log.episode_id},
                {"stop_reason", log.stop_reason},
                {"completed", log.completed},
                {"shortest_geodesic", log.shortest_geodesic},
                {"metrics", metrics_json(log.report)}};
    report["start"] = vec2_json(log.source.start.position);
    report["start_heading"] = log.source.start.heading;
    report["goal"] = vec2_json(log.source.goal);
    report["success_radius"] = log.source.success_radius;
    json ref = json::array();
    for (const auto& p : log.source.reference_path) ref.push_back(vec2_json(p));
    report["reference_path"] = ref;
    report["instruction"] = log.source.instruction;
    report["transport_error"] =
        log.transport_error.empty() ? json(nullptr) : json(log.transport_error);
    out << report.dump() << "\n";
}

RescoredLog rescore_log(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open trajectory log: " + path);

    std::vector<Vec2> positions;
    json report;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError("trajectory log line: " + std::string(e.what()));
        }
        std::string type = j.value("type", "");
        if (type == "step") {
            for (const auto& p : j.at("positions")) {
                positions.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
            }
        } else if (type == "report") {
            report = j;
        }
    }
    if (report.is_null()) throw ParseError("trajectory log has no report line: " + path);

    RescoredLog out;
    out.episode_id = report.at("episode_id").get<std::string>();
    out.stored = metrics_from_json(report.at("metrics"));
    out.completed = report.value("completed", false);
    if (!out.completed) {
        out.recomputed = out.stored;
        return out;
    }

    Trajectory traj;
    traj.points.push_back(
        {report.at("start").at(0).get<double>(), report.at("start").at(1).get<double>()});
    for (const auto& p : positions) traj.points.push_back(p);

    std::vector<Vec2> reference;
    for (const auto& p : report.at("reference_path")) {
        reference.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    }
    Vec2 goal{report.at("goal").at(0).get<double>(), report.at("goal").at(1).get<double>()};
    double radius = report.at("success_radius").get<double>();
    double shortest = report.at("shortest_geodesic").get<double>();

    out.recomputed = compute_report(traj, reference, goal, radius, shortest, radius);
    return out;
}

bool RescoredLog::matches_bitwise() const {
    return stored.tl == recomputed.tl && stored.ne == recomputed.ne &&
           stored.sr == recomputed.sr && stored.osr == recomputed.osr &&
           stored.spl == recomputed.spl && stored.ndtw == recomputed.ndtw;
}

std::string aggregate_to_json(const BatchResult& result) {
    json j;
    j["count"] = result.aggregate.count;
    j["tl"] = result.aggregate.tl;
    j["ne"] = result.aggregate.ne;
    j["ndtw"] = result.aggregate.ndtw;
    j["osr"] = result.aggregate.osr;
    j["sr"] = result.aggregate.sr;
    j["spl"] = result.aggregate.spl;
    j["failed"] = result.failed_ids;
    j["episodes"] = json::array();
    for (const auto& log : result.logs) {
        json e{{"id", log.episode_id}, {"completed", log.completed}, {"stop_reason", log.stop_reason}};
        if (log.completed) e["metrics"] = metrics_json(log.report);
        j["episodes"].push_back(e);
    }
    return j.dump(2) + "\n";
}

std::string aggregate_table(const AggregateReport& agg) {
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "%-6s %-8s %-8s %-8s %-8s %-8s %-8s\n"
                  "%-6d %-8.2f %-8.2f %-8.2f %-8.1f %-8.1f %-8.2f\n",
                  "count", "TL", "NE", "nDTW", "OSR", "SR", "SPL", agg.count, agg.tl, agg.ne,
                  agg.ndtw, agg.osr, agg.sr, agg.spl);
    return buf;
}

} // namespace navsim
