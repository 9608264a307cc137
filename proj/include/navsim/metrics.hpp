#pragma once

#include <string>
#include <vector>

#include "navsim/geometry.hpp"

namespace navsim {

struct Trajectory {
    std::vector<Vec2> points; // agent positions, start first

    Vec2 final_point() const { return points.back(); }
};

// Raw per-episode scores: sr/osr are 0 or 1, spl and ndtw in [0, 1],
// tl/ne in meters.
struct MetricsReport {
    double tl = 0.0;
    double ne = 0.0;
    double sr = 0.0;
    double osr = 0.0;
    double spl = 0.0;
    double ndtw = 0.0;
};

// Batch means; ratio metrics reported x100.
struct AggregateReport {
    int count = 0;
    double tl = 0.0;
    double ne = 0.0;
    double ndtw = 0.0; // x100
    double osr = 0.0;  // x100
    double sr = 0.0;   // x100
    double spl = 0.0;  // x100
};

double path_length(const Trajectory& t);
double nav_error(const Trajectory& t, Vec2 goal);
int success(const Trajectory& t, Vec2 goal, double radius);
int oracle_success(const Trajectory& t, Vec2 goal, double radius);

// success * shortest / max(taken, shortest). Throws Error when shortest <= 0.
double spl(int success, double shortest, double taken);

// Dynamic time warping over the step pattern {(i-1,j), (i,j-1), (i-1,j-1)}
// with Euclidean point costs. Throws Error on empty input.
double dtw(const std::vector<Vec2>& p, const std::vector<Vec2>& r);

// exp(-dtw / (|r| * d_th)); |r| is the reference point count.
double ndtw(const std::vector<Vec2>& p, const std::vector<Vec2>& r, double d_th = 3.0);

// Token-level F1 (bag of lowercased alphanumeric tokens over the joined
// phrases) and ROUGE-L (LCS recall/precision harmonic mean).
struct DecompositionScore {
    double f1 = 0.0;
    double rouge_l = 0.0;
};
DecompositionScore score_decomposition(const std::vector<std::string>& predicted,
                                       const std::vector<std::string>& reference);

MetricsReport compute_report(const Trajectory& t, const std::vector<Vec2>& reference_path,
                             Vec2 goal, double success_radius, double shortest_geodesic,
                             double d_th);

// Means over per-episode reports, ratios scaled x100. Throws Error on an
// empty list.
AggregateReport aggregate(const std::vector<MetricsReport>& reports);

} // namespace navsim
