#pragma once

#include <vector>

#include "navsim/world.hpp"

namespace navsim {

// Angular x distance traversability grid. Sector a covers the relative
// heading a * 2*pi/num_sectors (counter-clockwise, sector 0 dead ahead);
// distance bin j is centred at min_distance + j * bin step.
struct Heatmap {
    int num_sectors = 12;
    int num_bins = 12;
    double min_distance = 0.25; // meters, centre of bin 0
    double max_distance = 3.0;  // meters, centre of the last bin
    std::vector<double> scores; // row-major [sector * num_bins + bin]

    Heatmap() { scores.assign(static_cast<size_t>(num_sectors) * num_bins, 0.0); }
    Heatmap(int sectors, int bins, double dmin, double dmax)
        : num_sectors(sectors), num_bins(bins), min_distance(dmin), max_distance(dmax) {
        scores.assign(static_cast<size_t>(sectors) * bins, 0.0);
    }

    double& at(int sector, int bin) { return scores[static_cast<size_t>(sector) * num_bins + bin]; }
    double at(int sector, int bin) const {
        return scores[static_cast<size_t>(sector) * num_bins + bin];
    }
    double sector_angle(int sector) const {
        return wrap_to_pi(sector * kTwoPi / num_sectors);
    }
    double bin_distance(int bin) const {
        return num_bins > 1
                   ? min_distance + bin * (max_distance - min_distance) / (num_bins - 1)
                   : min_distance;
    }
};

struct WaypointParams {
    int num_sectors = 12;
    int num_bins = 12;
    double min_distance = 0.25;
    double max_distance = 3.0;
    int suppress_sectors = 1;       // NMS neighbourhood: +-1 sector...
    double suppress_distance = 0.5; // ...and +-0.5 m
};

// Geometric traversability frontend: score 1 when a disc of the given
// radius can sweep from the pose to the bin centre without touching an
// obstacle or leaving the bounds, else 0.
Heatmap build_heatmap(const WorldMap& map, const Pose2D& pose, double radius,
                      const WaypointParams& params = {});

// Circular moving average over each bin and its two angular neighbours at
// the same distance bin.
Heatmap smooth_heatmap(const Heatmap& h);

// Greedy non-maximum suppression. Repeatedly takes the highest positive
// score (ties: larger distance, then lower sector index), emits the bin
// centre as a waypoint, and zeroes every bin within +-suppress_sectors
// (circular) and +-suppress_distance meters. Returns at most k waypoints.
std::vector<Waypoint> nms_select(const Heatmap& h, int k,
                                 const WaypointParams& params = {});

// Full proposal pipeline: build -> smooth -> nms, then drop any candidate
// whose straight segment from the pose is not collision-clear at the agent
// radius or whose landing disc leaves the bounds.
std::vector<Waypoint> propose_waypoints(const WorldMap& map, const Pose2D& pose, double radius,
                                        int k, const WaypointParams& params = {});

// Landing point of a relative waypoint executed from a pose.
Vec2 waypoint_landing(const Pose2D& pose, const Waypoint& wp);

} // namespace navsim
