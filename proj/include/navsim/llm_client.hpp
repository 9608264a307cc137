#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "navsim/episodes.hpp"
#include "navsim/navigator.hpp"
#include "navsim/world.hpp"

namespace navsim {

enum class Role { System, User, Assistant };

struct ChatMessage {
    Role role = Role::User;
    std::string content;
};

enum class BackendKind { Http, Scripted, Oracle, Random };

struct BackendConfig {
    BackendKind kind = BackendKind::Scripted;
    std::string endpoint;      // base URL, http kind only
    std::string model;         // model name sent on the wire
    double temperature = 0.0;  // 0 for reproducibility
    double timeout_s = 60.0;   // per-request connect/read timeout
    uint64_t seed = 0;         // random kind
    std::vector<std::string> script; // scripted kind; last entry repeats
    std::string api_key;       // optional bearer token, http kind
    int max_inflight = 4;      // concurrent request cap, http kind

    // Throws ValidationError when the endpoint presence does not match the
    // kind or numeric fields are out of range.
    void validate() const;
};

// Environment overrides applied by backend_config_from_cli and the CLI:
//   NAVSIM_ENDPOINT  chat-completions base URL
//   NAVSIM_API_KEY   bearer token
inline constexpr const char* kEndpointEnvVar = "NAVSIM_ENDPOINT";
inline constexpr const char* kApiKeyEnvVar = "NAVSIM_API_KEY";

// Per-step grounding for the oracle backend, set by the episode runner
// before each decision request.
struct StepContext {
    Pose2D pose;
    std::vector<Waypoint> candidates;
};

class Backend {
  public:
    virtual ~Backend() = default;

    // Returns the assistant message text. Throws TransportError on HTTP
    // failures; never throws for the offline kinds.
    virtual std::string complete(const std::vector<ChatMessage>& messages) = 0;

    // No-op except for the oracle backend.
    virtual void on_step(const StepContext&) {}
};

// For scripted/random/oracle the result is a per-episode instance; the
// http backend is shareable across episodes (per-call state only, bounded
// by max_inflight). world/episode may be null except for the oracle kind.
std::unique_ptr<Backend> make_backend(const BackendConfig& cfg, const WorldMap* world,
                                      const Episode* episode,
                                      double agent_radius = kDefaultAgentRadius);

struct RetryPolicy {
    int attempts = 3;
    std::vector<double> backoff_s = {0.5, 1.0, 2.0}; // wait before retry i+1
};

// Forwards to backend.complete, retrying TransportError up to
// policy.attempts total attempts with the configured backoff. Rethrows the
// last TransportError when every attempt fails.
std::string chat(Backend& backend, const std::vector<ChatMessage>& messages,
                 const RetryPolicy& policy = {});

// Mutable per-episode state of the ground-truth navigator: monotone arc
// progress along the reference path. The lookahead matches the longest
// candidate stride so straight stretches are walked at full steps.
struct OracleState {
    double progress_arc = 0.0;
    double lookahead_m = 3.0;
};

// Ground-truth decision used as the performance ceiling: STOP when within
// the success radius of the goal, otherwise the candidate whose landing
// point has the smallest geodesic distance to the next unvisited
// reference-path vertex (ties to the lowest index). Returns a
// "Final Answer: ..." line.
std::string oracle_decide(const WorldMap& world, const VisibilityGraph& graph,
                          const Episode& episode, const Pose2D& pose,
                          const std::vector<Waypoint>& candidates, OracleState& state);

const char* role_name(Role role);

} // namespace navsim
