#include "navsim/geometry.hpp"

#include <algorithm>
#include <limits>

namespace navsim {

double wrap_to_2pi(double theta) {
    double t = std::fmod(theta, kTwoPi);
    if (t < 0.0) t += kTwoPi;
    // fmod can return exactly 2*pi after the adjustment when theta is a
    // tiny negative number.
    if (t >= kTwoPi) t = 0.0;
    return t;
}

double wrap_to_pi(double theta) {
    double t = wrap_to_2pi(theta);
    if (t > kPi) t -= kTwoPi;
    return t;
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    Vec2 ab = b - a;
    double len_sq = ab.norm_sq();
    if (len_sq <= 0.0) return distance(p, a);
    double t = std::clamp((p - a).dot(ab) / len_sq, 0.0, 1.0);
    return distance(p, a + ab * t);
}

namespace {

int orientation_sign(Vec2 a, Vec2 b, Vec2 c, double tol) {
    double v = (b - a).cross(c - a);
    if (v > tol) return 1;
    if (v < -tol) return -1;
    return 0;
}

bool on_segment_collinear(Vec2 a, Vec2 b, Vec2 p, double tol) {
    return p.x >= std::min(a.x, b.x) - tol && p.x <= std::max(a.x, b.x) + tol &&
           p.y >= std::min(a.y, b.y) - tol && p.y <= std::max(a.y, b.y) + tol;
}

} // namespace

bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d, double tol) {
    int o1 = orientation_sign(a, b, c, tol);
    int o2 = orientation_sign(a, b, d, tol);
    int o3 = orientation_sign(c, d, a, tol);
    int o4 = orientation_sign(c, d, b, tol);

    if (o1 != o2 && o3 != o4) return true;

    if (o1 == 0 && on_segment_collinear(a, b, c, tol)) return true;
    if (o2 == 0 && on_segment_collinear(a, b, d, tol)) return true;
    if (o3 == 0 && on_segment_collinear(c, d, a, tol)) return true;
    if (o4 == 0 && on_segment_collinear(c, d, b, tol)) return true;
    return false;
}

double segment_segment_distance(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    if (segments_intersect(a, b, c, d, 0.0)) return 0.0;
    double m = point_segment_distance(a, c, d);
    m = std::min(m, point_segment_distance(b, c, d));
    m = std::min(m, point_segment_distance(c, a, b));
    m = std::min(m, point_segment_distance(d, a, b));
    return m;
}

std::optional<double> ray_segment_intersection(Vec2 origin, Vec2 dir, Vec2 a, Vec2 b) {
    Vec2 ab = b - a;
    double denom = dir.cross(ab);
    Vec2 oa = a - origin;
    if (std::abs(denom) < kGeomEps) {
        // Parallel. Collinear overlap: nearest endpoint ahead of the origin.
        if (std::abs(dir.cross(oa)) >= kGeomEps) return std::nullopt;
        double ta = oa.dot(dir);
        double tb = (b - origin).dot(dir);
        double t = std::numeric_limits<double>::infinity();
        if (ta >= -kGeomEps) t = std::min(t, std::max(ta, 0.0));
        if (tb >= -kGeomEps) t = std::min(t, std::max(tb, 0.0));
        if (!std::isfinite(t)) return std::nullopt;
        return t;
    }
    double t = oa.cross(ab) / denom; // along the ray
    double s = oa.cross(dir) / denom; // along the segment
    if (t < -kGeomEps || s < -kGeomEps || s > 1.0 + kGeomEps) return std::nullopt;
    return std::max(t, 0.0);
}

std::optional<double> swept_disc_hit(Vec2 origin, Vec2 dir, double radius, Vec2 a, Vec2 b) {
    if (point_segment_distance(origin, a, b) <= radius + kGeomEps) return 0.0;

    double best = std::numeric_limits<double>::infinity();

    // Endpoint circles: |origin + t*dir - c| = radius.
    auto circle_hit = [&](Vec2 c) {
        Vec2 oc = c - origin;
        double proj = oc.dot(dir);
        double disc = proj * proj - (oc.norm_sq() - radius * radius);
        if (disc < 0.0) return;
        double t = proj - std::sqrt(disc);
        if (t >= 0.0 && t < best) best = t;
    };
    circle_hit(a);
    circle_hit(b);

    // Interior contact: perpendicular distance to the ab line equals radius,
    // with the foot of the perpendicular inside the segment.
    Vec2 ab = b - a;
    double len = ab.norm();
    if (len > 0.0) {
        Vec2 n = Vec2{-ab.y / len, ab.x / len};
        double s0 = (origin - a).dot(n); // signed distance at t = 0
        double ds = dir.dot(n);
        for (double target : {radius, -radius}) {
            if (std::abs(ds) < kGeomEps) continue;
            double t = (target - s0) / ds;
            if (t < 0.0 || t >= best) continue;
            Vec2 p = origin + dir * t;
            double lambda = (p - a).dot(ab) / (len * len);
            if (lambda >= 0.0 && lambda <= 1.0) best = t;
        }
    }

    if (!std::isfinite(best)) return std::nullopt;
    return best;
}

bool point_in_polygon(Vec2 p, const std::vector<Vec2>& vertices) {
    bool inside = false;
    size_t n = vertices.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        Vec2 vi = vertices[i];
        Vec2 vj = vertices[j];
        bool crosses = (vi.y > p.y) != (vj.y > p.y);
        if (crosses) {
            double x_at = vj.x + (vi.x - vj.x) * (p.y - vj.y) / (vi.y - vj.y);
            if (p.x < x_at) inside = !inside;
        }
    }
    return inside;
}

double polygon_signed_area(const std::vector<Vec2>& vertices) {
    double acc = 0.0;
    size_t n = vertices.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        acc += vertices[j].cross(vertices[i]);
    }
    return 0.5 * acc;
}

bool polygon_is_simple(const std::vector<Vec2>& vertices) {
    size_t n = vertices.size();
    if (n < 3) return false;
    for (size_t i = 0; i < n; ++i) {
        Vec2 a = vertices[i];
        Vec2 b = vertices[(i + 1) % n];
        for (size_t j = i + 1; j < n; ++j) {
            // Skip adjacent edges (they share a vertex by construction).
            if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
            Vec2 c = vertices[j];
            Vec2 d = vertices[(j + 1) % n];
            if (segments_intersect(a, b, c, d)) return false;
        }
    }
    return true;
}

} // namespace navsim
