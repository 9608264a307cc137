#pragma once

#include <string>
#include <vector>

#include "navsim/geometry.hpp"

namespace navsim {

// Default agent disc radius and sensing range, in meters. Both are
// overridable wherever they appear as parameters.
inline constexpr double kDefaultAgentRadius = 0.18;
inline constexpr double kRayMax = 10.0;

// Offset applied on top of the clearance radius when placing visibility
// graph nodes off obstacle corners.
inline constexpr double kCornerOffset = 1e-3;

struct Pose2D {
    Vec2 position;
    double heading = 0.0; // radians, [0, 2*pi)

    static Pose2D make(double x, double y, double heading_rad) {
        return {{x, y}, wrap_to_2pi(heading_rad)};
    }
};

struct ObstaclePolygon {
    std::vector<Vec2> vertices; // >= 3, simple, implicitly closed
};

struct SceneObject {
    std::string label;
    Vec2 position;
};

struct Bounds {
    double min_x = 0.0, min_y = 0.0, max_x = 0.0, max_y = 0.0;

    bool contains(Vec2 p) const {
        return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y;
    }
    bool contains_disc(Vec2 p, double radius) const {
        return p.x >= min_x + radius && p.x <= max_x - radius &&
               p.y >= min_y + radius && p.y <= max_y - radius;
    }
    double width() const { return max_x - min_x; }
    double height() const { return max_y - min_y; }
};

struct WorldMap {
    Bounds bounds;
    std::vector<ObstaclePolygon> obstacles;
    std::vector<SceneObject> objects;
};

// Relative motion command: angle is measured from the current heading
// (counter-clockwise positive), distance in meters.
struct Waypoint {
    double angle = 0.0;    // (-pi, pi]
    double distance = 0.0; // meters
};

// --- validation ----------------------------------------------------------

// Throws ValidationError when a map invariant is violated (degenerate or
// self-intersecting polygon, vertex or object out of bounds, object inside
// an obstacle).
void validate_map(const WorldMap& map);

// --- geometry queries -----------------------------------------------------

bool point_in_any_obstacle(const WorldMap& map, Vec2 p);

// Distance from p to the nearest obstacle edge; +inf with no obstacles.
double obstacle_clearance(const WorldMap& map, Vec2 p);

// p is a valid centre for a disc of the given radius: inside bounds,
// outside all obstacles, clearance >= radius.
bool position_clear(const WorldMap& map, Vec2 p, double radius);

// Distance along the ray to the first obstacle edge or bounds edge,
// capped at kRayMax. Throws InvalidOriginError when origin is inside an
// obstacle.
double raycast(const WorldMap& map, Vec2 origin, double angle);

// True iff a disc of the given radius swept from p to q touches no
// obstacle. Bounds are not considered; callers enforce the in-bounds
// precondition separately.
bool segment_clear(const WorldMap& map, Vec2 p, Vec2 q, double radius);

// Clamped motion: advance from pose along heading+waypoint.angle by at most
// waypoint.distance, stopping where a disc of the given radius would first
// touch an obstacle or leave the bounds. The returned heading is the
// movement direction even when fully blocked.
Pose2D move_along(const WorldMap& map, const Pose2D& pose, const Waypoint& waypoint,
                  double radius);

// --- shortest paths -------------------------------------------------------

// Shortest collision-free path planner over corner nodes pushed off
// obstacle vertices by radius+kCornerOffset along the outward bisector.
// Construction precomputes node-to-node visibility; queries insert the two
// terminals and run Dijkstra. Queries are const and safe to run from
// multiple threads.
class VisibilityGraph {
  public:
    VisibilityGraph(const WorldMap& map, double radius);

    // Throws UnreachableError when either terminal is an invalid position
    // or no collision-free path exists.
    double distance(Vec2 from, Vec2 to) const;
    std::vector<Vec2> path(Vec2 from, Vec2 to) const;

    double radius() const { return radius_; }
    const std::vector<Vec2>& nodes() const { return nodes_; }

  private:
    std::vector<Vec2> search(Vec2 from, Vec2 to, double* out_length) const;

    const WorldMap& map_;
    double radius_;
    std::vector<Vec2> nodes_;
    std::vector<std::vector<std::pair<int, double>>> adjacency_;
};

// One-shot convenience wrappers; build the graph per call. Hot paths keep
// a VisibilityGraph instead.
double geodesic_distance(const WorldMap& map, Vec2 p, Vec2 q, double radius);
std::vector<Vec2> geodesic_path(const WorldMap& map, Vec2 p, Vec2 q, double radius);

// --- map file io ----------------------------------------------------------

WorldMap load_map(const std::string& path);
void save_map(const WorldMap& map, const std::string& path);
WorldMap map_from_json_text(const std::string& text);
std::string map_to_json_text(const WorldMap& map);

// Built-in 20x20 m indoor demo map with labelled furniture-style objects.
WorldMap make_demo_map();

} // namespace navsim
