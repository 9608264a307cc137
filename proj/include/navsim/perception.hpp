#pragma once

#include <string>
#include <vector>

#include "navsim/waypoint.hpp"
#include "navsim/world.hpp"

namespace navsim {

// Field of view around each candidate direction, one panoramic view wide.
inline constexpr double kWaypointFov = 15.0 * kPi / 180.0;

struct VisibleObject {
    std::string label;
    double distance = 0.0; // meters from the agent
    double bearing = 0.0;  // radians relative to heading, CCW positive
};

struct WaypointObservation {
    int waypoint_index = 0;
    Waypoint waypoint;
    std::vector<VisibleObject> objects; // nearest first
    double openness = 0.0;              // free-space distance along the waypoint direction
};

struct SceneObservation {
    std::vector<WaypointObservation> entries; // one per candidate waypoint
};

struct SceneDescription {
    std::string text;
};

// For each candidate waypoint, collects every object with an unobstructed
// line of sight within +-kWaypointFov of the waypoint direction and within
// kRayMax, sorted nearest first, plus the raycast openness along the
// waypoint direction.
SceneObservation observe(const WorldMap& map, const Pose2D& pose,
                         const std::vector<Waypoint>& waypoints);

// Fixed-template textualization, one description per waypoint. Distances
// are rounded to 0.1 m; bearings within 10 degrees of the heading read
// "ahead", otherwise "left"/"right" (CCW positive is left).
std::vector<SceneDescription> textualize(const SceneObservation& obs);

} // namespace navsim
