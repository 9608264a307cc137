#pragma once

#include <optional>
#include <string>
#include <vector>

#include "navsim/perception.hpp"

namespace navsim {

// Instruction split into motions to execute and objects to seek.
struct Decomposition {
    std::vector<std::string> actions;
    std::vector<std::string> landmarks;
};

enum class ActionStatus { Completed, Pending };

struct ProgressEstimate {
    std::vector<ActionStatus> statuses; // one per decomposed action
    int last_completed_index = -1;      // -1 when nothing is completed
    std::string rationale;

    static ProgressEstimate all_pending(size_t n_actions, std::string why = {});
};

struct PromptContext {
    std::string instruction;
    Decomposition decomposition;
    std::string history_summary; // empty until the first move
    ProgressEstimate progress;
    std::vector<SceneDescription> candidate_descriptions;
    int step_index = 0;
};

struct NavDecision {
    std::optional<int> choice; // candidate index; nullopt means STOP
    std::string thought;
    bool fallback_used = false;

    bool is_stop() const { return !choice.has_value(); }
};

enum class DecompositionKind { Actions, Landmarks };

// --- prompt construction -----------------------------------------------------

// Single-turn prompt asking the model to decompose the instruction into
// either actions or landmarks. Throws std::invalid_argument on an empty
// instruction.
std::string build_comprehension_prompt(const std::string& instruction, DecompositionKind kind);

// Four-step progress analysis prompt; directs the model to answer with one
// "<action> - COMPLETED|PENDING" line per action.
std::string build_progress_prompt(const PromptContext& ctx);

// Candidate-selection prompt; directs the model to end with
// "Final Answer: <index>" or "Final Answer: STOP".
std::string build_decision_prompt(const PromptContext& ctx);

// --- response parsing ---------------------------------------------------------

// Splits on newlines, numbered items, and semicolons; strips numbering and
// bullets. nullopt when no phrase survives.
std::optional<std::vector<std::string>> parse_decomposition(const std::string& llm_output);

// Extracts one status per line and coerces the sequence so no completed
// action follows a pending one. nullopt when fewer than n_actions statuses
// are found.
std::optional<ProgressEstimate> parse_progress(const std::string& llm_output, int n_actions);

// Reads the last "Final Answer:" token. nullopt when missing or the index
// is out of range.
std::optional<NavDecision> parse_decision(const std::string& llm_output, int n_candidates);

// --- history -------------------------------------------------------------------

inline constexpr int kHistoryMaxLines = 20;
inline constexpr size_t kThoughtExcerptChars = 120;

// Appends one step line (distance moved, direction, nearest objects, thought
// excerpt) and keeps the most recent kHistoryMaxLines lines.
std::string summarize_step(const std::string& prev_summary, int step_index,
                           const NavDecision& decision, const Waypoint& executed_waypoint,
                           const WaypointObservation& obs);

// Straightest-ahead candidate (smallest |angle|, ties to the lower index),
// used after repeated parse failures.
NavDecision decide_fallback(const std::vector<Waypoint>& candidates);

} // namespace navsim
