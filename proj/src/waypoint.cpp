#include "navsim/waypoint.hpp"

#include <algorithm>
#include <cmath>

namespace navsim {

Vec2 waypoint_landing(const Pose2D& pose, const Waypoint& wp) {
    return pose.position + unit_from_angle(pose.heading + wp.angle) * wp.distance;
}

Heatmap build_heatmap(const WorldMap& map, const Pose2D& pose, double radius,
                      const WaypointParams& params) {
    Heatmap h(params.num_sectors, params.num_bins, params.min_distance, params.max_distance);
    for (int a = 0; a < h.num_sectors; ++a) {
        double angle = pose.heading + a * kTwoPi / h.num_sectors;
        Vec2 dir = unit_from_angle(angle);
        for (int j = 0; j < h.num_bins; ++j) {
            Vec2 target = pose.position + dir * h.bin_distance(j);
            // A bin is traversable when the swept disc stays clear of
            // obstacles and the landing disc stays inside the world.
            bool clear = map.bounds.contains_disc(target, radius) &&
                         segment_clear(map, pose.position, target, radius);
            h.at(a, j) = clear ? 1.0 : 0.0;
        }
    }
    return h;
}

Heatmap smooth_heatmap(const Heatmap& h) {
    Heatmap out(h.num_sectors, h.num_bins, h.min_distance, h.max_distance);
    int a_count = h.num_sectors;
    for (int a = 0; a < a_count; ++a) {
        int prev = (a + a_count - 1) % a_count;
        int next = (a + 1) % a_count;
        for (int j = 0; j < h.num_bins; ++j) {
            out.at(a, j) = (h.at(prev, j) + h.at(a, j) + h.at(next, j)) / 3.0;
        }
    }
    return out;
}

std::vector<Waypoint> nms_select(const Heatmap& h, int k, const WaypointParams& params) {
    std::vector<Waypoint> picked;
    if (k < 1) return picked;

    Heatmap work = h;
    int a_count = h.num_sectors;
    while (static_cast<int>(picked.size()) < k) {
        int best_a = -1, best_j = -1;
        double best_score = 0.0;
        for (int a = 0; a < a_count; ++a) {
            for (int j = 0; j < h.num_bins; ++j) {
                double s = work.at(a, j);
                if (s <= 0.0) continue;
                // Ties prefer the larger distance bin, then the lower sector
                // index. Bin index order equals distance order.
                bool better = best_a < 0 || s > best_score ||
                              (s == best_score &&
                               (j > best_j || (j == best_j && a < best_a)));
                if (better) {
                    best_a = a;
                    best_j = j;
                    best_score = s;
                }
            }
        }
        if (best_a < 0) break;

        picked.push_back({h.sector_angle(best_a), h.bin_distance(best_j)});

        double picked_dist = h.bin_distance(best_j);
        for (int a = 0; a < a_count; ++a) {
            int circ = std::abs(a - best_a);
            circ = std::min(circ, a_count - circ);
            if (circ > params.suppress_sectors) continue;
            for (int j = 0; j < h.num_bins; ++j) {
                if (std::abs(h.bin_distance(j) - picked_dist) <=
                    params.suppress_distance + kGeomEps) {
                    work.at(a, j) = 0.0;
                }
            }
        }
    }
    return picked;
}

std::vector<Waypoint> propose_waypoints(const WorldMap& map, const Pose2D& pose, double radius,
                                        int k, const WaypointParams& params) {
    Heatmap smoothed = smooth_heatmap(build_heatmap(map, pose, radius, params));
    std::vector<Waypoint> raw = nms_select(smoothed, k, params);
    std::vector<Waypoint> valid;
    for (const auto& wp : raw) {
        Vec2 landing = waypoint_landing(pose, wp);
        if (!map.bounds.contains_disc(landing, radius)) continue;
        if (!segment_clear(map, pose.position, landing, radius)) continue;
        valid.push_back(wp);
    }
    return valid;
}

} // namespace navsim
