#include "navsim/world.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <sstream>

#include <json.hpp>

#include "navsim/errors.hpp"

namespace navsim {

namespace {

using json = nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

void for_each_edge(const ObstaclePolygon& poly, auto&& fn) {
    size_t n = poly.vertices.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        fn(poly.vertices[j], poly.vertices[i]);
    }
}

} // namespace

void validate_map(const WorldMap& map) {
    if (map.bounds.max_x - map.bounds.min_x <= 0.0 || map.bounds.max_y - map.bounds.min_y <= 0.0)
        throw ValidationError("map bounds are empty");
    for (size_t i = 0; i < map.obstacles.size(); ++i) {
        const auto& poly = map.obstacles[i];
        if (poly.vertices.size() < 3)
            throw ValidationError("obstacle " + std::to_string(i) + " has fewer than 3 vertices");
        if (!polygon_is_simple(poly.vertices))
            throw ValidationError("obstacle " + std::to_string(i) + " is self-intersecting");
        for (const auto& v : poly.vertices) {
            if (!std::isfinite(v.x) || !std::isfinite(v.y))
                throw ValidationError("obstacle " + std::to_string(i) + " has non-finite vertex");
            if (!map.bounds.contains(v))
                throw ValidationError("obstacle " + std::to_string(i) + " leaves the map bounds");
        }
    }
    for (const auto& obj : map.objects) {
        if (obj.label.empty()) throw ValidationError("object with empty label");
        if (!map.bounds.contains(obj.position))
            throw ValidationError("object '" + obj.label + "' outside map bounds");
        if (point_in_any_obstacle(map, obj.position))
            throw ValidationError("object '" + obj.label + "' inside an obstacle");
    }
}

bool point_in_any_obstacle(const WorldMap& map, Vec2 p) {
    for (const auto& poly : map.obstacles) {
        if (point_in_polygon(p, poly.vertices)) return true;
    }
    return false;
}

double obstacle_clearance(const WorldMap& map, Vec2 p) {
    double best = kInf;
    for (const auto& poly : map.obstacles) {
        for_each_edge(poly, [&](Vec2 a, Vec2 b) {
            best = std::min(best, point_segment_distance(p, a, b));
        });
    }
    return best;
}

bool position_clear(const WorldMap& map, Vec2 p, double radius) {
    if (!map.bounds.contains_disc(p, radius)) return false;
    if (point_in_any_obstacle(map, p)) return false;
    return obstacle_clearance(map, p) >= radius - kGeomEps;
}

double raycast(const WorldMap& map, Vec2 origin, double angle) {
    if (!map.bounds.contains(origin))
        throw InvalidOriginError("raycast origin outside map bounds");
    if (point_in_any_obstacle(map, origin))
        throw InvalidOriginError("raycast origin inside an obstacle");

    Vec2 dir = unit_from_angle(angle);
    double best = kRayMax;
    for (const auto& poly : map.obstacles) {
        for_each_edge(poly, [&](Vec2 a, Vec2 b) {
            if (auto t = ray_segment_intersection(origin, dir, a, b)) {
                best = std::min(best, *t);
            }
        });
    }
    const Bounds& bb = map.bounds;
    const Vec2 corners[4] = {
        {bb.min_x, bb.min_y}, {bb.max_x, bb.min_y}, {bb.max_x, bb.max_y}, {bb.min_x, bb.max_y}};
    for (int i = 0; i < 4; ++i) {
        if (auto t = ray_segment_intersection(origin, dir, corners[i], corners[(i + 1) % 4])) {
            best = std::min(best, *t);
        }
    }
    return best;
}

namespace {

// Strict crossing test for the radius-0 case: the segments' interiors pass
// through each other rather than merely touching.
bool strict_cross(Vec2 p, Vec2 q, Vec2 a, Vec2 b) {
    auto side = [](Vec2 u, Vec2 v, Vec2 w) {
        double c = (v - u).cross(w - u);
        if (c > kGeomEps) return 1;
        if (c < -kGeomEps) return -1;
        return 0;
    };
    int o1 = side(p, q, a);
    int o2 = side(p, q, b);
    int o3 = side(a, b, p);
    int o4 = side(a, b, q);
    return o1 * o2 < 0 && o3 * o4 < 0;
}

} // namespace

bool segment_clear(const WorldMap& map, Vec2 p, Vec2 q, double radius) {
    for (const auto& poly : map.obstacles) {
        if (point_in_polygon(p, poly.vertices) || point_in_polygon(q, poly.vertices)) return false;
        bool blocked = false;
        for_each_edge(poly, [&](Vec2 a, Vec2 b) {
            if (blocked) return;
            if (radius > 0.0) {
                if (segment_segment_distance(p, q, a, b) < radius - kGeomEps) blocked = true;
            } else if (strict_cross(p, q, a, b)) {
                // Touching an edge is allowed at radius 0; crossing is not.
                blocked = true;
            }
        });
        if (blocked) return false;
    }
    return true;
}

Pose2D move_along(const WorldMap& map, const Pose2D& pose, const Waypoint& waypoint,
                  double radius) {
    double heading = wrap_to_2pi(pose.heading + waypoint.angle);
    Vec2 dir = unit_from_angle(heading);
    double limit = std::max(0.0, waypoint.distance);

    double t_block = kInf;
    for (const auto& poly : map.obstacles) {
        for_each_edge(poly, [&](Vec2 a, Vec2 b) {
            if (auto t = swept_disc_hit(pose.position, dir, radius, a, b)) {
                t_block = std::min(t_block, *t);
            }
        });
    }

    // The disc must also stay inside the bounds rectangle.
    const Bounds& bb = map.bounds;
    auto axis_exit = [](double pos, double d, double lo, double hi) {
        if (d > kGeomEps) return (hi - pos) / d;
        if (d < -kGeomEps) return (lo - pos) / d;
        return kInf;
    };
    t_block = std::min(t_block, axis_exit(pose.position.x, dir.x, bb.min_x + radius, bb.max_x - radius));
    t_block = std::min(t_block, axis_exit(pose.position.y, dir.y, bb.min_y + radius, bb.max_y - radius));

    double executed = std::min(limit, std::max(0.0, t_block));
    return {pose.position + dir * executed, heading};
}

// --- visibility graph ------------------------------------------------------

VisibilityGraph::VisibilityGraph(const WorldMap& map, double radius)
    : map_(map), radius_(radius) {
    for (const auto& poly : map.obstacles) {
        // Normalize to counter-clockwise so the outward side is consistent.
        std::vector<Vec2> verts = poly.vertices;
        if (polygon_signed_area(verts) < 0.0) std::reverse(verts.begin(), verts.end());
        size_t n = verts.size();
        for (size_t i = 0; i < n; ++i) {
            Vec2 prev = verts[(i + n - 1) % n];
            Vec2 next = verts[(i + 1) % n];
            Vec2 in_dir = (verts[i] - prev).normalized();
            Vec2 out_dir = (next - verts[i]).normalized();
            Vec2 outward = (in_dir.perp_right() + out_dir.perp_right());
            if (outward.norm() < kGeomEps) outward = in_dir.perp_right();
            // Scale the bisector offset so the node clears the adjacent edge
            // lines by radius+kCornerOffset; otherwise the chord between two
            // neighbouring corner nodes dips inside the inflation ring and
            // the graph disconnects around every box.
            double turn = std::acos(std::clamp(in_dir.dot(out_dir), -1.0, 1.0));
            double scale = 1.0 / std::max(std::cos(turn / 2.0), 1.0 / 6.0);
            Vec2 node = verts[i] + outward.normalized() * ((radius + kCornerOffset) * scale);
            if (position_clear(map_, node, radius_)) nodes_.push_back(node);
        }
    }

    adjacency_.resize(nodes_.size());
    for (size_t i = 0; i < nodes_.size(); ++i) {
        for (size_t j = i + 1; j < nodes_.size(); ++j) {
            if (segment_clear(map_, nodes_[i], nodes_[j], radius_)) {
                double d = navsim::distance(nodes_[i], nodes_[j]);
                adjacency_[i].push_back({static_cast<int>(j), d});
                adjacency_[j].push_back({static_cast<int>(i), d});
            }
        }
    }
}

std::vector<Vec2> VisibilityGraph::search(Vec2 from, Vec2 to, double* out_length) const {
    if (!position_clear(map_, from, radius_))
        throw UnreachableError("start position is not traversable");
    if (!position_clear(map_, to, radius_))
        throw UnreachableError("goal position is not traversable");

    if (navsim::distance(from, to) < kGeomEps) {
        if (out_length) *out_length = 0.0;
        return {from, to};
    }
    if (segment_clear(map_, from, to, radius_)) {
        if (out_length) *out_length = navsim::distance(from, to);
        return {from, to};
    }

    // Node layout: [corner nodes..., from, to].
    int n = static_cast<int>(nodes_.size());
    int src = n, dst = n + 1;
    std::vector<std::vector<std::pair<int, double>>> extra(2);
    for (int i = 0; i < n; ++i) {
        if (segment_clear(map_, from, nodes_[i], radius_))
            extra[0].push_back({i, navsim::distance(from, nodes_[i])});
        if (segment_clear(map_, to, nodes_[i], radius_))
            extra[1].push_back({i, navsim::distance(to, nodes_[i])});
    }

    std::vector<double> dist(n + 2, kInf);
    std::vector<int> parent(n + 2, -1);
    using QItem = std::pair<double, int>;
    std::priority_queue<QItem, std::vector<QItem>, std::greater<>> queue;
    dist[src] = 0.0;
    queue.push({0.0, src});
    while (!queue.empty()) {
        auto [d, u] = queue.top();
        queue.pop();
        if (d > dist[u]) continue;
        if (u == dst) break;
        auto relax = [&](int v, double w) {
            if (d + w < dist[v]) {
                dist[v] = d + w;
                parent[v] = u;
                queue.push({dist[v], v});
            }
        };
        if (u == src) {
            for (auto [v, w] : extra[0]) relax(v, w);
        } else {
            for (auto [v, w] : adjacency_[u]) relax(v, w);
            // Edges into the goal terminal, discovered lazily.
            for (auto [v, w] : extra[1]) {
                if (v == u) relax(dst, w);
            }
        }
    }

    if (!std::isfinite(dist[dst])) throw UnreachableError("goal unreachable from start");
    if (out_length) *out_length = dist[dst];

    std::vector<Vec2> path;
    for (int v = dst; v != -1; v = parent[v]) {
        path.push_back(v == src ? from : (v == dst ? to : nodes_[v]));
    }
    std::reverse(path.begin(), path.end());
    return path;
}

double VisibilityGraph::distance(Vec2 from, Vec2 to) const {
    double length = 0.0;
    search(from, to, &length);
    return length;
}

std::vector<Vec2> VisibilityGraph::path(Vec2 from, Vec2 to) const {
    return search(from, to, nullptr);
}

double geodesic_distance(const WorldMap& map, Vec2 p, Vec2 q, double radius) {
    return VisibilityGraph(map, radius).distance(p, q);
}

std::vector<Vec2> geodesic_path(const WorldMap& map, Vec2 p, Vec2 q, double radius) {
    return VisibilityGraph(map, radius).path(p, q);
}

// --- map file io ------------------------------------------------------------

WorldMap map_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("map JSON: ") + e.what());
    }
    try {
        WorldMap map;
        const auto& b = j.at("bounds");
        map.bounds = {b.at("min_x").get<double>(), b.at("min_y").get<double>(),
                      b.at("max_x").get<double>(), b.at("max_y").get<double>()};
        for (const auto& poly : j.value("obstacles", json::array())) {
            ObstaclePolygon o;
            for (const auto& v : poly) {
                o.vertices.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
            }
            map.obstacles.push_back(std::move(o));
        }
        for (const auto& obj : j.value("objects", json::array())) {
            map.objects.push_back({obj.at("label").get<std::string>(),
                                   {obj.at("x").get<double>(), obj.at("y").get<double>()}});
        }
        validate_map(map);
        return map;
    } catch (const json::exception& e) {
        throw ParseError(std::string("map JSON: ") + e.what());
    }
}

std::string map_to_json_text(const WorldMap& map) {
    json j;
    j["bounds"] = {{"min_x", map.bounds.min_x},
                   {"min_y", map.bounds.min_y},
                   {"max_x", map.bounds.max_x},
                   {"max_y", map.bounds.max_y}};
    j["obstacles"] = json::array();
    for (const auto& poly : map.obstacles) {
        json verts = json::array();
        for (const auto& v : poly.vertices) verts.push_back({v.x, v.y});
        j["obstacles"].push_back(verts);
    }
    j["objects"] = json::array();
    for (const auto& obj : map.objects) {
        j["objects"].push_back({{"label", obj.label}, {"x", obj.position.x}, {"y", obj.position.y}});
    }
    return j.dump(2) + "\n";
}

WorldMap load_map(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open map file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return map_from_json_text(ss.str());
}

void save_map(const WorldMap& map, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write map file: " + path);
    out << map_to_json_text(map);
}

} // namespace navsim
