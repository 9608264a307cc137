#include "navsim/navigator.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace navsim {

namespace {

std::string to_lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// "1.", "2)", "(3)", "-", "*", "•" item markers.
std::string strip_item_marker(std::string s) {
    size_t i = 0;
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    size_t start = i;
    if (i < s.size() && s[i] == '(') ++i;
    size_t digits = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
        ++i;
        ++digits;
    }
    if (digits > 0 && i < s.size() && (s[i] == '.' || s[i] == ')' || s[i] == ':')) {
        return s.substr(i + 1);
    }
    i = start;
    if (i < s.size() && (s[i] == '-' || s[i] == '*')) return s.substr(i + 1);
    return s.substr(start);
}

bool contains_word_ci(const std::string& haystack_lower, const std::string& needle_lower) {
    return haystack_lower.find(needle_lower) != std::string::npos;
}

std::string join_numbered(const std::vector<std::string>& items) {
    std::string out;
    for (size_t i = 0; i < items.size(); ++i) {
        out += std::to_string(i + 1) + ". " + items[i] + "\n";
    }
    return out;
}

const char* kNoHistory = "(no steps taken yet)";

std::string history_block(const PromptContext& ctx) {
    return ctx.history_summary.empty() ? kNoHistory : ctx.history_summary;
}

} // namespace

ProgressEstimate ProgressEstimate::all_pending(size_t n_actions, std::string why) {
    ProgressEstimate pe;
    pe.statuses.assign(n_actions, ActionStatus::Pending);
    pe.last_completed_index = -1;
    pe.rationale = std::move(why);
    return pe;
}

std::string build_comprehension_prompt(const std::string& instruction, DecompositionKind kind) {
    if (instruction.empty()) throw std::invalid_argument("instruction is empty");
    const bool actions = kind == DecompositionKind::Actions;
    const char* article = actions ? "an action" : "a landmark";
    const char* plural = actions ? "actions" : "landmarks";
    const char* singular = actions ? "action" : "landmark";
    const char* tail = actions ? "Actions:" : "Landmarks:";

    std::string p = "Instruction: " + instruction + "\n\n";
    p += "You are ";
    p += article;
    p += " decomposition expert. Your task is to detect all ";
    p += plural;
    p += " in the given navigation instruction. Ensure the integrity of each ";
    p += singular;
    p += ". Your answer must consist ONLY of a series of labeled ";
    p += singular;
    p += " phrases without beginning sentences. Can you decompose ";
    p += plural;
    p += " in the instruction? ";
    p += tail;
    return p;
}

std::string build_progress_prompt(const PromptContext& ctx) {
    std::ostringstream p;
    p << "You are tracking the progress of a navigation task.\n\n";
    p << "Instruction: " << ctx.instruction << "\n\n";
    p << "Decomposed actions:\n" << join_numbered(ctx.decomposition.actions);
    p << "Extracted landmarks:\n" << join_numbered(ctx.decomposition.landmarks);
    p << "\nNavigation history:\n" << history_block(ctx) << "\n\n";
    p << "Analyze the progress through these four steps:\n";
    p << "1. Landmark and Action Verification: identify which decomposed landmarks or actions "
         "have been encountered or executed based on the navigation history.\n";
    p << "2. Directional Analysis: assess the change of direction at each navigational step "
         "against the prescribed route.\n";
    p << "3. Action Completion Estimation: compare each action in the instruction against the "
         "agent's movement and decision history to determine its completion status.\n";
    p << "4. Sequential Evaluation: treat the completion of a later action as contingent on the "
         "completion of all earlier actions.\n\n";
    size_t n = ctx.decomposition.actions.size();
    p << "Respond with exactly " << n << " line" << (n == 1 ? "" : "s")
      << ", one line per action: <action> - COMPLETED|PENDING";
    return p.str();
}

std::string build_decision_prompt(const PromptContext& ctx) {
    std::ostringstream p;
    p << "You are deciding the next move of a navigation agent.\n\n";
    p << "Instruction: " << ctx.instruction << "\n\n";
    p << "Decomposed actions:\n" << join_numbered(ctx.decomposition.actions);
    p << "Extracted landmarks:\n" << join_numbered(ctx.decomposition.landmarks);
    p << "\nNavigation history:\n" << history_block(ctx) << "\n\n";

    p << "Progress estimate:\n";
    bool all_completed = !ctx.progress.statuses.empty();
    for (size_t i = 0; i < ctx.progress.statuses.size(); ++i) {
        bool done = ctx.progress.statuses[i] == ActionStatus::Completed;
        all_completed = all_completed && done;
        std::string name = i < ctx.decomposition.actions.size() ? ctx.decomposition.actions[i]
                                                                : "action " + std::to_string(i + 1);
        p << name << " - " << (done ? "COMPLETED" : "PENDING") << "\n";
    }
    if (all_completed) {
        p << "All actions appear completed; stopping here may be appropriate.\n";
    }

    p << "\nCandidate waypoints:\n";
    for (size_t i = 0; i < ctx.candidate_descriptions.size(); ++i) {
        p << "Candidate " << i << ": " << ctx.candidate_descriptions[i].text << "\n";
    }
    p << "\nEvaluate the candidates against the instruction, the progress estimate, and the "
         "history. Explain your reasoning, then end with 'Final Answer: <index>' "
         "or 'Final Answer: STOP'.";
    return p.str();
}

std::optional<std::vector<std::string>> parse_decomposition(const std::string& llm_output) {
    std::vector<std::string> phrases;
    std::string line;
    std::istringstream lines(llm_output);
    while (std::getline(lines, line)) {
        std::string rest = strip_item_marker(line);
        size_t pos = 0;
        while (pos <= rest.size()) {
            size_t semi = rest.find(';', pos);
            std::string piece =
                semi == std::string::npos ? rest.substr(pos) : rest.substr(pos, semi - pos);
            std::string cleaned = trim(strip_item_marker(piece));
            bool has_content =
                std::any_of(cleaned.begin(), cleaned.end(),
                            [](unsigned char c) { return std::isalnum(c) != 0; });
            if (has_content) phrases.push_back(cleaned);
            if (semi == std::string::npos) break;
            pos = semi + 1;
        }
    }
    if (phrases.empty()) return std::nullopt;
    return phrases;
}

std::optional<ProgressEstimate> parse_progress(const std::string& llm_output, int n_actions) {
    if (n_actions < 1) return std::nullopt;
    std::vector<ActionStatus> found;
    std::istringstream lines(llm_output);
    std::string line;
    while (std::getline(lines, line)) {
        std::string low = to_lower(line);
        if (contains_word_ci(low, "pending")) {
            found.push_back(ActionStatus::Pending);
        } else if (contains_word_ci(low, "completed")) {
            found.push_back(ActionStatus::Completed);
        }
    }
    if (static_cast<int>(found.size()) < n_actions) return std::nullopt;
    found.resize(n_actions);

    ProgressEstimate pe;
    pe.rationale = llm_output;
    bool pending_seen = false;
    for (int i = 0; i < n_actions; ++i) {
        // No completed action may follow a pending one.
        if (found[i] == ActionStatus::Pending) pending_seen = true;
        pe.statuses.push_back(pending_seen ? ActionStatus::Pending : found[i]);
        if (pe.statuses.back() == ActionStatus::Completed) pe.last_completed_index = i;
    }
    return pe;
}

std::optional<NavDecision> parse_decision(const std::string& llm_output, int n_candidates) {
    if (n_candidates < 1) return std::nullopt;
    std::string low = to_lower(llm_output);
    size_t pos = low.rfind("final answer");
    if (pos == std::string::npos) return std::nullopt;
    size_t i = pos + std::string("final answer").size();
    while (i < low.size() && (low[i] == ':' || low[i] == ' ' || low[i] == '\t')) ++i;
    if (i >= low.size()) return std::nullopt;

    NavDecision d;
    d.thought = llm_output;
    if (low.compare(i, 4, "stop") == 0) {
        d.choice = std::nullopt;
        return d;
    }
    if (!std::isdigit(static_cast<unsigned char>(low[i]))) return std::nullopt;
    int value = 0;
    while (i < low.size() && std::isdigit(static_cast<unsigned char>(low[i]))) {
        value = value * 10 + (low[i] - '0');
        if (value > n_candidates) break;
        ++i;
    }
    if (value >= n_candidates) return std::nullopt;
    d.choice = value;
    return d;
}

std::string summarize_step(const std::string& prev_summary, int step_index,
                           const NavDecision& decision, const Waypoint& executed_waypoint,
                           const WaypointObservation& obs) {
    std::string excerpt = decision.thought.substr(0, kThoughtExcerptChars);
    std::replace(excerpt.begin(), excerpt.end(), '\n', ' ');
    std::replace(excerpt.begin(), excerpt.end(), '\r', ' ');

    std::string labels;
    size_t shown = std::min<size_t>(obs.objects.size(), 3);
    for (size_t i = 0; i < shown; ++i) {
        if (i > 0) labels += ", ";
        labels += obs.objects[i].label;
    }
    if (labels.empty()) labels = "none";

    char head[96];
    std::snprintf(head, sizeof(head), "Step %d: moved %.1f m at %.0f°; nearest objects: ",
                  step_index, executed_waypoint.distance,
                  executed_waypoint.angle * 180.0 / kPi);

    std::string line = std::string(head) + labels + "; thought: " + excerpt;

    std::vector<std::string> all_lines;
    std::istringstream prev(prev_summary);
    std::string l;
    while (std::getline(prev, l)) {
        if (!l.empty()) all_lines.push_back(l);
    }
    all_lines.push_back(line);
    size_t keep = std::min<size_t>(all_lines.size(), kHistoryMaxLines);
    std::string out;
    for (size_t i = all_lines.size() - keep; i < all_lines.size(); ++i) {
        if (!out.empty()) out += "\n";
        out += all_lines[i];
    }
    return out;
}

NavDecision decide_fallback(const std::vector<Waypoint>& candidates) {
    int best = 0;
    for (size_t i = 1; i < candidates.size(); ++i) {
        if (std::abs(candidates[i].angle) < std::abs(candidates[best].angle)) {
            best = static_cast<int>(i);
        }
    }
    NavDecision d;
    d.choice = best;
    d.thought = "fallback: choosing the straightest-ahead candidate";
    d.fallback_used = true;
    return d;
}

} // namespace navsim
