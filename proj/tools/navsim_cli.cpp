#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "navsim/episodes.hpp"
#include "navsim/errors.hpp"
#include "navsim/harness.hpp"
#include "navsim/world.hpp"

namespace {

using namespace navsim;

std::vector<std::string> load_script(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open script file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    nlohmann::json j = nlohmann::json::parse(ss.str());
    if (!j.is_array()) throw ParseError("script file must be a JSON array of strings");
    std::vector<std::string> script;
    for (const auto& item : j) script.push_back(item.get<std::string>());
    return script;
}

BackendKind parse_backend(const std::string& name) {
    if (name == "http") return BackendKind::Http;
    if (name == "scripted") return BackendKind::Scripted;
    if (name == "oracle") return BackendKind::Oracle;
    if (name == "random") return BackendKind::Random;
    throw ValidationError("unknown backend: " + name);
}

int cmd_run(RunConfig& cfg, const std::string& backend_name, const std::string& script_path) {
    cfg.backend.kind = parse_backend(backend_name);
    if (cfg.backend.kind == BackendKind::Random) cfg.backend.seed = cfg.seed;
    if (!script_path.empty()) cfg.backend.script = load_script(script_path);
    if (cfg.backend.kind == BackendKind::Http) {
        if (cfg.backend.endpoint.empty()) {
            if (const char* env = std::getenv(kEndpointEnvVar)) cfg.backend.endpoint = env;
        }
        if (const char* key = std::getenv(kApiKeyEnvVar)) cfg.backend.api_key = key;
    }

    BatchResult result = run_batch(cfg);
    std::cout << aggregate_table(result.aggregate);
    if (!cfg.out_dir.empty()) {
        std::cout << "logs written to " << cfg.out_dir << "\n";
    }
    if (!result.all_completed()) {
        std::cerr << result.failed_ids.size() << " episode(s) failed:";
        for (const auto& id : result.failed_ids) std::cerr << " " << id;
        std::cerr << "\n";
        return 1;
    }
    return 0;
}

int cmd_score(const std::string& in_dir, const std::string& out_file, bool check) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(in_dir)) {
        if (entry.path().extension() == ".jsonl") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        std::cerr << "no .jsonl logs found in " << in_dir << "\n";
        return 2;
    }

    std::vector<MetricsReport> reports;
    int mismatches = 0;
    for (const auto& file : files) {
        RescoredLog rescored = rescore_log(file.string());
        if (!rescored.completed) continue;
        reports.push_back(rescored.recomputed);
        if (check && !rescored.matches_bitwise()) {
            ++mismatches;
            std::cerr << "mismatch: " << rescored.episode_id << " (" << file.string() << ")\n";
        }
    }
    if (reports.empty()) {
        std::cerr << "no completed episodes among the logs\n";
        return 2;
    }
    AggregateReport agg = aggregate(reports);
    std::cout << aggregate_table(agg);
    if (!out_file.empty()) {
        BatchResult shim;
        shim.aggregate = agg;
        std::ofstream out(out_file);
        out << aggregate_to_json(shim);
    }
    if (check) {
        if (mismatches > 0) {
            std::cerr << mismatches << " log(s) failed the re-score check\n";
            return 1;
        }
        std::cout << "all logs re-score bit-identically\n";
    }
    return 0;
}

int cmd_gen(const std::string& map_path, const std::string& demo_map_out, uint64_t seed, int n,
            const std::string& out_file, double success_radius, double agent_radius) {
    std::string effective_map = map_path;
    if (!demo_map_out.empty()) {
        save_map(make_demo_map(), demo_map_out);
        std::cout << "demo map written to " << demo_map_out << "\n";
        if (effective_map.empty()) effective_map = demo_map_out;
    }
    if (out_file.empty()) return 0;
    if (effective_map.empty()) {
        std::cerr << "--map (or --demo-map) is required to generate episodes\n";
        return 2;
    }

    WorldMap map = effective_map == "demo" ? make_demo_map() : load_map(effective_map);
    GeneratorParams params;
    params.success_radius = success_radius;
    params.agent_radius = agent_radius;
    EpisodeSet set = generate_synthetic(map, seed, n, params);
    set.map_ref = std::filesystem::path(effective_map).filename().string();
    save_episodes(set, out_file);
    std::cout << set.episodes.size() << " episodes written to " << out_file << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Language-guided navigation evaluation harness"};
    app.require_subcommand(1);

    // run
    RunConfig cfg;
    std::string backend_name = "oracle";
    std::string script_path;
    auto* run = app.add_subcommand("run", "Run a batch of episodes and report metrics");
    run->add_option("--map", cfg.map_path, "Map JSON file, or 'demo' for the built-in map")
        ->required();
    run->add_option("--episodes", cfg.episodes_path, "Episode JSON file");
    run->add_option("--synthetic", cfg.synthetic_n, "Generate N synthetic episodes instead");
    run->add_option("--seed", cfg.seed, "Seed for synthetic episodes and the random backend");
    run->add_option("--backend", backend_name, "http|scripted|oracle|random")->required();
    run->add_option("--endpoint", cfg.backend.endpoint,
                    "Chat-completions base URL (or NAVSIM_ENDPOINT)");
    run->add_option("--model", cfg.backend.model, "Model name for the http backend");
    run->add_option("--script", script_path, "JSON array of canned responses (scripted backend)");
    run->add_option("--temperature", cfg.backend.temperature, "Sampling temperature");
    run->add_option("--timeout", cfg.backend.timeout_s, "HTTP timeout in seconds");
    run->add_option("--k", cfg.k_waypoints, "Candidate waypoints per step");
    run->add_option("--max-steps", cfg.max_steps, "Step budget per episode");
    run->add_option("--radius", cfg.success_radius, "Success radius for synthetic episodes (m)");
    run->add_option("--agent-radius", cfg.agent_radius, "Agent disc radius (m)");
    run->add_option("--parallel", cfg.parallelism, "Concurrent episodes");
    run->add_option("--out", cfg.out_dir, "Directory for JSONL logs and reports");
    run->add_flag("--dump-heatmaps", cfg.dump_heatmaps, "Embed smoothed heatmaps in step records");

    // score
    std::string score_in, score_out;
    bool score_check = false;
    auto* score = app.add_subcommand("score", "Re-score stored trajectory logs");
    score->add_option("--in", score_in, "Directory of .jsonl trajectory logs")->required();
    score->add_option("--out", score_out, "Write the aggregate report JSON here");
    score->add_flag("--check", score_check, "Verify stored metrics match bit-for-bit");

    // gen
    std::string gen_map, gen_demo_out, gen_out;
    uint64_t gen_seed = 7;
    int gen_n = 20;
    double gen_radius = 3.0, gen_agent_radius = kDefaultAgentRadius;
    auto* gen = app.add_subcommand("gen", "Emit synthetic episode files and the demo map");
    gen->add_option("--map", gen_map, "Map JSON file, or 'demo'");
    gen->add_option("--demo-map", gen_demo_out, "Write the built-in demo map to this path");
    gen->add_option("--seed", gen_seed, "Generator seed");
    gen->add_option("--n", gen_n, "Number of episodes");
    gen->add_option("--out", gen_out, "Episode JSON output path");
    gen->add_option("--radius", gen_radius, "Success radius (m)");
    gen->add_option("--agent-radius", gen_agent_radius, "Agent disc radius (m)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            if (run->count("--synthetic") > 0) cfg.synthetic = true;
            if (!cfg.synthetic && cfg.episodes_path.empty()) {
                std::cerr << "run needs --episodes or --synthetic\n";
                return 2;
            }
            return cmd_run(cfg, backend_name, script_path);
        }
        if (score->parsed()) return cmd_score(score_in, score_out, score_check);
        if (gen->parsed())
            return cmd_gen(gen_map, gen_demo_out, gen_seed, gen_n, gen_out, gen_radius,
                           gen_agent_radius);
    } catch (const navsim::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
