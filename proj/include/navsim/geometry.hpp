#pragma once

#include <cmath>
#include <optional>
#include <vector>

namespace navsim {

// Tolerance for intersection predicates.
inline constexpr double kGeomEps = 1e-9;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    bool operator==(const Vec2&) const = default;

    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double cross(Vec2 o) const { return x * o.y - y * o.x; }
    double norm() const { return std::hypot(x, y); }
    double norm_sq() const { return x * x + y * y; }
    Vec2 normalized() const {
        double n = norm();
        return n > 0.0 ? Vec2{x / n, y / n} : Vec2{0.0, 0.0};
    }
    // 90 degrees clockwise; points to the right of the direction.
    Vec2 perp_right() const { return {y, -x}; }
};

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

inline Vec2 unit_from_angle(double theta) { return {std::cos(theta), std::sin(theta)}; }

// Wrap to [0, 2*pi).
double wrap_to_2pi(double theta);

// Wrap to (-pi, pi].
double wrap_to_pi(double theta);

// Distance from point p to segment ab.
double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);

// True if segments ab and cd cross (interiors intersect or touch within tol).
bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d, double tol = kGeomEps);

// Minimum distance between segments ab and cd (0 when they intersect).
double segment_segment_distance(Vec2 a, Vec2 b, Vec2 c, Vec2 d);

// Parameter t >= 0 of the first intersection of ray origin+t*dir with
// segment ab, if any. dir must be unit length.
std::optional<double> ray_segment_intersection(Vec2 origin, Vec2 dir, Vec2 a, Vec2 b);

// Smallest t >= 0 at which a disc of the given radius centred at
// origin+t*dir first touches segment ab. Returns 0 when already touching,
// nullopt when the sweep never reaches the segment. dir must be unit length.
std::optional<double> swept_disc_hit(Vec2 origin, Vec2 dir, double radius, Vec2 a, Vec2 b);

// Even-odd test; points on the boundary count as outside.
bool point_in_polygon(Vec2 p, const std::vector<Vec2>& vertices);

// Signed area (positive for counter-clockwise winding).
double polygon_signed_area(const std::vector<Vec2>& vertices);

// True if no two non-adjacent edges intersect.
bool polygon_is_simple(const std::vector<Vec2>& vertices);

} // namespace navsim
