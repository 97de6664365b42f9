#pragma once

// Planar primitives shared by every other header: points/vectors, directed
// lines, circles, error reporting.  Everything is a small value type; all
// functions are pure.

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace olb {

// ---------------------------------------------------------------------------
// errors

enum class errc {
  invalid_argument,
  point_inside,
  on_singular_ray,
  edge_aligned,
  singular,
  numerical_degeneracy,
  no_solution,
  not_found,
  ambiguous,
  collinear,
  incomplete_orbit,
  radius_too_small,
  origin_outside,
  nearest_point_on_edge,
  degenerate,
  d_too_large,
  too_sparse,
  label_mismatch,
  unknown_symbol,
  no_candidate,
  bracket_failure,
};

inline const char* to_string(errc c) {
  switch (c) {
    case errc::invalid_argument:      return "invalid_argument";
    case errc::point_inside:          return "point_inside";
    case errc::on_singular_ray:       return "on_singular_ray";
    case errc::edge_aligned:          return "edge_aligned";
    case errc::singular:              return "singular";
    case errc::numerical_degeneracy:  return "numerical_degeneracy";
    case errc::no_solution:           return "no_solution";
    case errc::not_found:             return "not_found";
    case errc::ambiguous:             return "ambiguous";
    case errc::collinear:             return "collinear";
    case errc::incomplete_orbit:      return "incomplete_orbit";
    case errc::radius_too_small:      return "radius_too_small";
    case errc::origin_outside:        return "origin_outside";
    case errc::nearest_point_on_edge: return "nearest_point_on_edge";
    case errc::degenerate:            return "degenerate";
    case errc::d_too_large:           return "d_too_large";
    case errc::too_sparse:            return "too_sparse";
    case errc::label_mismatch:        return "label_mismatch";
    case errc::unknown_symbol:        return "unknown_symbol";
    case errc::no_candidate:          return "no_candidate";
    case errc::bracket_failure:       return "bracket_failure";
  }
  return "unknown";
}

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) {
  throw error(code, what);
}

// ---------------------------------------------------------------------------
// points and vectors

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

using Vec2 = Point2;

constexpr Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
constexpr Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
constexpr Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
constexpr Point2 operator*(Point2 a, double s) { return {s * a.x, s * a.y}; }
constexpr Point2 operator/(Point2 a, double s) { return {a.x / s, a.y / s}; }
constexpr Point2 operator-(Point2 a) { return {-a.x, -a.y}; }

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
constexpr double norm2(Vec2 a) { return a.x * a.x + a.y * a.y; }
inline double dist(Point2 a, Point2 b) { return norm(a - b); }

// CCW quarter turn.
constexpr Vec2 perp(Vec2 a) { return {-a.y, a.x}; }

inline Vec2 normalized(Vec2 a) {
  double n = norm(a);
  if (n == 0.0) fail(errc::numerical_degeneracy, "normalizing zero vector");
  return a / n;
}

inline Vec2 rotated(Vec2 a, double angle) {
  double c = std::cos(angle), s = std::sin(angle);
  return {c * a.x - s * a.y, s * a.x + c * a.y};
}

inline double polar_angle(Point2 p) { return std::atan2(p.y, p.x); }

inline bool finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

inline void require_finite(Point2 p, const char* who) {
  if (!finite(p)) fail(errc::invalid_argument, std::string(who) + ": non-finite point");
}

// Interior angle at apex between rays apex->a and apex->b, in [0, pi].
inline double angle_at(Point2 apex, Point2 a, Point2 b) {
  Vec2 u = a - apex, v = b - apex;
  double c = cross(u, v), d = dot(u, v);
  return std::abs(std::atan2(c, d));
}

// ---------------------------------------------------------------------------
// directed line: unit direction, points to the "left" are at positive
// signed distance.  Map code keeps the table on the left of every line.

struct DirectedLine {
  Point2 origin;
  Vec2 direction;  // unit

  static DirectedLine through(Point2 a, Point2 b) {
    return {a, normalized(b - a)};
  }
  double signed_dist(Point2 p) const { return cross(direction, p - origin); }
  Point2 at(double t) const { return origin + t * direction; }
  double project(Point2 p) const { return dot(p - origin, direction); }
  Point2 foot(Point2 p) const { return at(project(p)); }
};

// Intersection parameter on `a`; callers decide how to handle near-parallel
// pairs via the returned denominator.
struct LineIntersection {
  Point2 point;
  double denom;  // cross(a.dir, b.dir)
};

inline LineIntersection intersect(const DirectedLine& a, const DirectedLine& b) {
  double den = cross(a.direction, b.direction);
  if (den == 0.0) return {Point2{std::numeric_limits<double>::quiet_NaN(),
                                 std::numeric_limits<double>::quiet_NaN()},
                          0.0};
  double t = cross(b.origin - a.origin, b.direction) / den;
  return {a.at(t), den};
}

inline Point2 intersect_or_fail(const DirectedLine& a, const DirectedLine& b,
                                double min_sin = 1e-14) {
  auto r = intersect(a, b);
  if (std::abs(r.denom) < min_sin)
    fail(errc::numerical_degeneracy, "near-parallel line intersection");
  return r.point;
}

inline bool same_line(const DirectedLine& a, const DirectedLine& b, double tol) {
  if (std::abs(cross(a.direction, b.direction)) > 1e-9) return false;
  return std::abs(a.signed_dist(b.origin)) <= tol;
}

// ---------------------------------------------------------------------------
// circle

struct Circle {
  Point2 center;
  double radius = 0.0;
};

// ---------------------------------------------------------------------------
// ray (used by the singularity machinery)

struct Ray {
  Point2 origin;
  Vec2 direction;  // unit

  double distance_to(Point2 p) const {
    double t = dot(p - origin, direction);
    if (t <= 0.0) return dist(p, origin);
    return std::abs(cross(direction, p - origin));
  }
};

// Proper segment/ray crossing test used by the Lemma-crossings census.
inline bool segment_crosses_ray(Point2 a, Point2 b, const Ray& r, double tol) {
  // solve a + t*d = r.origin + s*r.direction
  Vec2 d = b - a;
  double den = cross(d, r.direction);
  if (std::abs(den) < tol) return false;  // parallel: grazing does not count
  Vec2 ao = r.origin - a;
  double t = cross(ao, r.direction) / den;
  double s = cross(ao, d) / den;
  return t >= -tol && t <= 1.0 + tol && s >= -tol;
}

}  // namespace olb
