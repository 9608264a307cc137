#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <stdexcept>

#include "navsim/navigator.hpp"

using namespace navsim;

namespace {

PromptContext sample_ctx(int n_actions = 3, int n_candidates = 3, bool with_history = false) {
    PromptContext ctx;
    ctx.instruction = "Walk past the sofa, then turn left and stop near the bed.";
    for (int i = 0; i < n_actions; ++i) {
        ctx.decomposition.actions.push_back("action " + std::to_string(i + 1));
    }
    ctx.decomposition.landmarks = {"sofa", "bed"};
    ctx.progress = ProgressEstimate::all_pending(ctx.decomposition.actions.size());
    for (int i = 0; i < n_candidates; ++i) {
        ctx.candidate_descriptions.push_back(
            {"Heading 0°, 1.0 m away: open space for 5.0 m. Objects: none visible."});
    }
    if (with_history) ctx.history_summary = "Step 0: moved 1.0 m at 0°; nearest objects: none; thought: x";
    return ctx;
}

} // namespace

TEST_CASE("comprehension prompt embeds the decomposition-expert text verbatim") {
    std::string p = build_comprehension_prompt("turn left", DecompositionKind::Actions);
    CHECK(p.find("You are an action decomposition expert. Your task is to detect all actions in "
                 "the given navigation instruction. Ensure the integrity of each action. Your "
                 "answer must consist ONLY of a series of labeled action phrases without "
                 "beginning sentences. Can you decompose actions in the instruction? Actions:") !=
          std::string::npos);
    CHECK(p.find("turn left") != std::string::npos);
}

TEST_CASE("comprehension prompt variants differ only in the action/landmark wording") {
    std::string a = build_comprehension_prompt("go", DecompositionKind::Actions);
    std::string l = build_comprehension_prompt("go", DecompositionKind::Landmarks);
    CHECK(a.substr(a.size() - 8) == "Actions:");
    CHECK(l.substr(l.size() - 10) == "Landmarks:");
    CHECK(a.find("all actions") != std::string::npos);
    CHECK(l.find("all landmarks") != std::string::npos);
    CHECK(l.find("a landmark decomposition expert") != std::string::npos);
    CHECK(l.find("actions") == std::string::npos);
}

TEST_CASE("comprehension prompt rejects an empty instruction") {
    CHECK_THROWS_AS(build_comprehension_prompt("", DecompositionKind::Actions),
                    std::invalid_argument);
}

TEST_CASE("parse_decomposition handles numbered lists") {
    auto parsed = parse_decomposition("1. turn left\n2. walk forward");
    REQUIRE(parsed.has_value());
    CHECK(*parsed == std::vector<std::string>{"turn left", "walk forward"});
}

TEST_CASE("parse_decomposition handles semicolons and bullets") {
    auto parsed = parse_decomposition("turn left; walk past the sofa; stop");
    REQUIRE(parsed.has_value());
    CHECK(parsed->size() == 3);
    CHECK((*parsed)[1] == "walk past the sofa");

    auto bullets = parse_decomposition("- open door\n* go in");
    REQUIRE(bullets.has_value());
    CHECK(*bullets == std::vector<std::string>{"open door", "go in"});
}

TEST_CASE("parse_decomposition signals failure on empty output") {
    CHECK_FALSE(parse_decomposition("").has_value());
    CHECK_FALSE(parse_decomposition("  \n\t ;; \n").has_value());
}

TEST_CASE("progress prompt names all four analysis steps") {
    std::string p = build_progress_prompt(sample_ctx());
    CHECK(p.find("Landmark and Action Verification") != std::string::npos);
    CHECK(p.find("Directional Analysis") != std::string::npos);
    CHECK(p.find("Action Completion Estimation") != std::string::npos);
    CHECK(p.find("Sequential Evaluation") != std::string::npos);
}

TEST_CASE("progress prompt covers the empty history boundary") {
    std::string p = build_progress_prompt(sample_ctx());
    CHECK(p.find("no steps taken yet") != std::string::npos);

    std::string with = build_progress_prompt(sample_ctx(3, 3, true));
    CHECK(with.find("no steps taken yet") == std::string::npos);
    CHECK(with.find("Step 0: moved 1.0 m") != std::string::npos);
}

TEST_CASE("progress prompt pins the status line count to the action count") {
    std::string p = build_progress_prompt(sample_ctx(3));
    CHECK(p.find("exactly 3 lines") != std::string::npos);
    CHECK(p.find("<action> - COMPLETED|PENDING") != std::string::npos);
}

TEST_CASE("parse_progress extracts per-line statuses") {
    auto pe = parse_progress("A - COMPLETED\nB - PENDING", 2);
    REQUIRE(pe.has_value());
    CHECK(pe->statuses ==
          std::vector<ActionStatus>{ActionStatus::Completed, ActionStatus::Pending});
    CHECK(pe->last_completed_index == 0);
}

TEST_CASE("parse_progress enforces the sequential invariant") {
    auto pe = parse_progress("A - PENDING\nB - COMPLETED", 2);
    REQUIRE(pe.has_value());
    CHECK(pe->statuses ==
          std::vector<ActionStatus>{ActionStatus::Pending, ActionStatus::Pending});
    CHECK(pe->last_completed_index == -1);
}

TEST_CASE("parse_progress with everything completed") {
    auto pe = parse_progress("a - COMPLETED\nb - COMPLETED\nc - COMPLETED", 3);
    REQUIRE(pe.has_value());
    CHECK(pe->last_completed_index == 2);
}

TEST_CASE("parse_progress fails when lines are missing") {
    CHECK_FALSE(parse_progress("A - COMPLETED", 2).has_value());
    CHECK_FALSE(parse_progress("nothing relevant", 1).has_value());
}

TEST_CASE("decision prompt numbers candidates in order and quotes the instruction") {
    PromptContext ctx = sample_ctx(3, 3);
    std::string p = build_decision_prompt(ctx);
    size_t c0 = p.find("Candidate 0:");
    size_t c1 = p.find("Candidate 1:");
    size_t c2 = p.find("Candidate 2:");
    REQUIRE(c0 != std::string::npos);
    REQUIRE(c1 != std::string::npos);
    REQUIRE(c2 != std::string::npos);
    CHECK(c0 < c1);
    CHECK(c1 < c2);
    CHECK(p.find(ctx.instruction) != std::string::npos);
    CHECK(p.find("Final Answer: <index>") != std::string::npos);
    CHECK(p.find("Final Answer: STOP") != std::string::npos);
}

TEST_CASE("decision prompt hints at stopping once everything is complete") {
    PromptContext ctx = sample_ctx();
    std::string without = build_decision_prompt(ctx);
    CHECK(without.find("stopping here may be appropriate") == std::string::npos);

    for (auto& s : ctx.progress.statuses) s = ActionStatus::Completed;
    std::string with = build_decision_prompt(ctx);
    CHECK(with.find("stopping here may be appropriate") != std::string::npos);
}

TEST_CASE("parse_decision reads indices, STOP, and rejects out-of-range") {
    auto d = parse_decision("I think candidate 2 is best.\nFinal Answer: 2", 5);
    REQUIRE(d.has_value());
    CHECK(d->choice == 2);
    CHECK_FALSE(d->is_stop());
    CHECK(d->thought.find("candidate 2 is best") != std::string::npos);

    auto stop = parse_decision("Final Answer: STOP", 3);
    REQUIRE(stop.has_value());
    CHECK(stop->is_stop());

    CHECK_FALSE(parse_decision("Final Answer: 9", 3).has_value());
    CHECK_FALSE(parse_decision("no answer here", 3).has_value());
    CHECK_FALSE(parse_decision("Final Answer: maybe", 3).has_value());
}

TEST_CASE("parse_decision uses the last final answer") {
    auto d = parse_decision("Final Answer: 0 ... wait.\nFinal Answer: 1", 3);
    REQUIRE(d.has_value());
    CHECK(d->choice == 1);
}

TEST_CASE("parse_decision round-trips every index") {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        int n = 1 + static_cast<int>(rng() % 12);
        int i = static_cast<int>(rng() % n);
        std::string text = "Reasoning text.\nFinal Answer: " + std::to_string(i);
        auto d = parse_decision(text, n);
        REQUIRE(d.has_value());
        CHECK(d->choice == i);
    }
}

TEST_CASE("summarize_step appends one line with the executed move") {
    NavDecision d;
    d.choice = 1;
    d.thought = "going straight toward the bed";
    WaypointObservation obs;
    obs.objects = {{"bed", 2.0, 0.1}, {"lamp", 3.0, -0.2}, {"rug", 4.0, 0.0}, {"door", 5.0, 0.0}};
    std::string s = summarize_step("", 0, d, {0.0, 1.5}, obs);
    CHECK(s.find("Step 0: moved 1.5 m at 0°") != std::string::npos);
    CHECK(s.find("bed, lamp, rug") != std::string::npos);
    CHECK(s.find("door") == std::string::npos); // at most three labels
    CHECK(s.find("going straight toward the bed") != std::string::npos);
    CHECK(std::count(s.begin(), s.end(), '\n') == 0);
}

TEST_CASE("summarize_step keeps only the most recent twenty lines") {
    NavDecision d;
    d.choice = 0;
    d.thought = "t";
    WaypointObservation obs;
    std::string s;
    for (int step = 0; step < 25; ++step) {
        s = summarize_step(s, step, d, {0.0, 1.0}, obs);
    }
    CHECK(std::count(s.begin(), s.end(), '\n') == 19);
    CHECK(s.find("Step 5:") == 0);   // oldest surviving line
    CHECK(s.find("Step 4:") == std::string::npos);
    CHECK(s.find("Step 24:") != std::string::npos);
}

TEST_CASE("summarize_step truncates long thoughts to the excerpt length") {
    NavDecision d;
    d.choice = 0;
    d.thought = std::string(500, 'x');
    WaypointObservation obs;
    std::string s = summarize_step("", 3, d, {0.5, 2.0}, obs);
    size_t marker = s.find("thought: ");
    REQUIRE(marker != std::string::npos);
    CHECK(s.size() - (marker + 9) == kThoughtExcerptChars);
}

TEST_CASE("decide_fallback picks the straightest candidate") {
    auto d = decide_fallback({{-0.5, 1.0}, {0.1, 1.0}, {1.0, 1.0}});
    CHECK(d.choice == 1);
    CHECK(d.fallback_used);

    auto tie = decide_fallback({{-0.2, 1.0}, {0.2, 1.0}});
    CHECK(tie.choice == 0); // first of equal magnitudes

    auto single = decide_fallback({{2.0, 0.5}});
    CHECK(single.choice == 0);
}
