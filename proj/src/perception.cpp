#include "navsim/perception.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace navsim {

namespace {

// Round-half-up to one decimal; distinct values >= 0.1 m apart always map
// to distinct strings.
std::string format_0_1(double v) {
    double rounded = std::floor(v * 10.0 + 0.5) / 10.0;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", rounded);
    return buf;
}

bool line_of_sight(const WorldMap& map, Vec2 from, Vec2 to) {
    return segment_clear(map, from, to, 0.0);
}

} // namespace

SceneObservation observe(const WorldMap& map, const Pose2D& pose,
                         const std::vector<Waypoint>& waypoints) {
    SceneObservation obs;
    for (size_t i = 0; i < waypoints.size(); ++i) {
        const Waypoint& wp = waypoints[i];
        WaypointObservation entry;
        entry.waypoint_index = static_cast<int>(i);
        entry.waypoint = wp;
        entry.openness = raycast(map, pose.position, pose.heading + wp.angle);

        for (const auto& obj : map.objects) {
            Vec2 rel = obj.position - pose.position;
            double dist = rel.norm();
            if (dist <= 0.0 || dist > kRayMax) continue;
            double bearing = wrap_to_pi(std::atan2(rel.y, rel.x) - pose.heading);
            double off_axis = wrap_to_pi(bearing - wp.angle);
            if (std::abs(off_axis) > kWaypointFov) continue;
            if (!line_of_sight(map, pose.position, obj.position)) continue;
            entry.objects.push_back({obj.label, dist, bearing});
        }
        std::stable_sort(entry.objects.begin(), entry.objects.end(),
                         [](const VisibleObject& a, const VisibleObject& b) {
                             return a.distance < b.distance;
                         });
        obs.entries.push_back(std::move(entry));
    }
    return obs;
}

std::vector<SceneDescription> textualize(const SceneObservation& obs) {
    std::vector<SceneDescription> out;
    for (const auto& entry : obs.entries) {
        double deg = entry.waypoint.angle * 180.0 / kPi;
        char head[64];
        std::snprintf(head, sizeof(head), "Heading %.0f°, ", deg);

        std::string text = head;
        text += format_0_1(entry.waypoint.distance) + " m away: open space for " +
                format_0_1(entry.openness) + " m. Objects: ";
        if (entry.objects.empty()) {
            text += "none visible";
        } else {
            for (size_t i = 0; i < entry.objects.size(); ++i) {
                const auto& vo = entry.objects[i];
                const char* side = "ahead";
                if (std::abs(vo.bearing) >= 10.0 * kPi / 180.0) {
                    side = vo.bearing > 0.0 ? "left" : "right";
                }
                if (i > 0) text += ", ";
                text += vo.label + " at " + format_0_1(vo.distance) + " m " + side;
            }
        }
        text += ".";
        out.push_back({std::move(text)});
    }
    return out;
}

} // namespace navsim
