#pragma once

// Convex tables, support contacts, the tangent-circle construction, and
// ellipse utilities.  This is the geometric substrate of the billiard map.

#include <algorithm>
#include <array>
#include <optional>
#include <vector>

#include "olb/core.hpp"

namespace olb {

// Side-of-line and point-coincidence predicates use this absolute tolerance
// scaled by the table diameter.
inline constexpr double kGeomTol = 1e-9;

// ---------------------------------------------------------------------------
// ConvexPolygon: CCW vertex list.  Two vertices make a degenerate segment
// table; three or more must be strictly convex.

class ConvexPolygon {
 public:
  explicit ConvexPolygon(std::vector<Point2> vertices)
      : vertices_(std::move(vertices)) {
    validate();
    diameter_ = 0.0;
    for (std::size_t i = 0; i < vertices_.size(); ++i)
      for (std::size_t j = i + 1; j < vertices_.size(); ++j)
        diameter_ = std::max(diameter_, dist(vertices_[i], vertices_[j]));
  }

  const std::vector<Point2>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  Point2 vertex(std::size_t i) const { return vertices_[i % vertices_.size()]; }
  double diameter() const { return diameter_; }
  bool is_segment() const { return vertices_.size() == 2; }

  double perimeter() const {
    double p = 0.0;
    for (std::size_t i = 0; i < vertices_.size(); ++i)
      p += dist(vertices_[i], vertex(i + 1));
    return p;
  }

  Point2 vertex_centroid() const {
    Point2 c{0, 0};
    for (auto& v : vertices_) c = c + v;
    return c / double(vertices_.size());
  }

  // Strict interior test; boundary points count as outside.
  bool contains(Point2 p, double tol_scale = kGeomTol) const {
    if (is_segment()) return false;
    double tol = tol_scale * diameter_;
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
      Vec2 e = vertex(i + 1) - vertices_[i];
      if (cross(e, p - vertices_[i]) <= tol * norm(e)) return false;
    }
    return true;
  }

  // Distance from p to the boundary, with the index of the nearest vertex
  // and whether the true nearest boundary point lies in an edge interior.
  struct BoundaryProximity {
    double distance;
    std::size_t nearest_vertex;
    bool nearest_on_edge;
  };

  BoundaryProximity boundary_proximity(Point2 p) const {
    double best_edge = std::numeric_limits<double>::infinity();
    double best_vert = std::numeric_limits<double>::infinity();
    std::size_t best_vi = 0;
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
      double dv = dist(p, vertices_[i]);
      if (dv < best_vert) { best_vert = dv; best_vi = i; }
      Point2 a = vertices_[i], b = vertex(i + 1);
      Vec2 e = b - a;
      double t = dot(p - a, e) / norm2(e);
      if (t > 0.0 && t < 1.0)
        best_edge = std::min(best_edge, dist(p, a + t * e));
    }
    bool on_edge = best_edge < best_vert * (1.0 - 1e-12);
    return {std::min(best_edge, best_vert), best_vi, on_edge};
  }

  ConvexPolygon scaled(double s) const {
    std::vector<Point2> v;
    v.reserve(vertices_.size());
    for (auto& p : vertices_) v.push_back(s * p);
    return ConvexPolygon(std::move(v));
  }

  ConvexPolygon translated(Vec2 t) const {
    std::vector<Point2> v;
    v.reserve(vertices_.size());
    for (auto& p : vertices_) v.push_back(p + t);
    return ConvexPolygon(std::move(v));
  }

 private:
  void validate() const {
    if (vertices_.size() < 2)
      fail(errc::invalid_argument, "polygon needs at least 2 vertices");
    for (auto& v : vertices_) require_finite(v, "ConvexPolygon");
    double scale = 0.0;
    for (std::size_t i = 0; i < vertices_.size(); ++i)
      scale = std::max(scale, dist(vertices_[i], vertices_[(i + 1) % vertices_.size()]));
    if (scale == 0.0) fail(errc::invalid_argument, "degenerate polygon");
    double tol = kGeomTol * scale;
    for (std::size_t i = 0; i < vertices_.size(); ++i)
      for (std::size_t j = i + 1; j < vertices_.size(); ++j)
        if (dist(vertices_[i], vertices_[j]) <= tol)
          fail(errc::invalid_argument, "repeated vertex");
    if (vertices_.size() == 2) return;
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
      Vec2 e1 = vertex(i + 1) - vertices_[i];
      Vec2 e2 = vertex(i + 2) - vertex(i + 1);
      if (cross(e1, e2) <= tol * norm(e1))
        fail(errc::invalid_argument, "vertices not strictly convex CCW");
    }
  }

  std::vector<Point2> vertices_;
  double diameter_ = 0.0;
};

// ---------------------------------------------------------------------------
// support contacts

struct SupportContacts {
  std::size_t left;   // contact of the support line lying left of the table
  std::size_t right;  // the other contact; the map's tangency vertex
};

// The two support-line contact vertices of x, classified left/right as seen
// from x facing the table.  The right contact has every other vertex on the
// left of the ray x->v (positive cross); the left contact has them on the
// right.  Collinear degeneracies mean x sits on a side-extension ray: if the
// right-hand line carries a whole side the map is singular there, if the
// left-hand one does only the contact label is ambiguous.
inline SupportContacts support_contacts(const ConvexPolygon& P, Point2 x) {
  require_finite(x, "support_contacts");
  if (P.contains(x)) fail(errc::point_inside, "support_contacts");
  const auto& vs = P.vertices();
  const std::size_t n = vs.size();
  const double tol = kGeomTol * P.diameter();

  std::optional<std::size_t> left, right;
  bool right_aligned = false, left_aligned = false;
  for (std::size_t i = 0; i < n; ++i) {
    Vec2 u = vs[i] - x;
    double un = norm(u);
    if (un <= tol) fail(errc::point_inside, "x coincides with a vertex");
    bool all_left = true, all_right = true, aligned = false;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      Vec2 w = vs[j] - x;
      double c = cross(u, w) / un;  // distance of v_j from line(x, v_i)
      if (c > tol) all_right = false;
      else if (c < -tol) all_left = false;
      else if (dot(u, w) > 0.0) aligned = true;  // second vertex on the same ray
    }
    if (all_left && all_right) continue;  // n==2 handled below via both passes
    if (all_left) {
      if (aligned) right_aligned = true;
      else if (!right) right = i;
      else right = (norm(vs[*right] - x) < un) ? right : i;  // defensive; cannot normally happen
    }
    if (all_right) {
      if (aligned) left_aligned = true;
      else if (!left) left = i;
    }
  }
  if (right_aligned)
    fail(errc::on_singular_ray, "x on a clockwise side extension");
  if (left_aligned)
    fail(errc::edge_aligned, "x on a counter-clockwise side extension");
  if (P.is_segment()) {
    // Both endpoints are contacts; classify by side of the segment line.
    Vec2 e = vs[1] - vs[0];
    double s = cross(e, x - vs[0]) / norm(e);
    if (std::abs(s) <= tol)
      fail(P.contains(x) ? errc::point_inside : errc::on_singular_ray,
           "collinear with segment table");
    // From x, left contact has all (one) other vertex to its right.
    Vec2 u0 = vs[0] - x, u1 = vs[1] - x;
    if (cross(u0, u1) > 0.0) return {1, 0};
    return {0, 1};
  }
  if (!left || !right)
    fail(errc::numerical_degeneracy, "support contacts not found");
  return {*left, *right};
}

// ---------------------------------------------------------------------------
// tangent circle of the map construction

// Unique circle tangent to l2 exactly at p (on l2) and tangent to l1, lying
// on the non-table side of l2.  Both lines carry the table on their left.
// Center = p + t*n, n the right normal of l2; tangency to l1 from the table
// side gives t = s0 / (1 - n.n1) with s0 the (left-positive) distance of p
// from l1.  1 - n.n1 is computed as |n - n1|^2 / 2 to stay accurate when the
// lines are nearly parallel.
inline Circle auxiliary_circle(const DirectedLine& l1, const DirectedLine& l2,
                               Point2 p, double scale_tol = 1e-12) {
  if (std::abs(norm2(l1.direction) - 1.0) > 1e-9 ||
      std::abs(norm2(l2.direction) - 1.0) > 1e-9)
    fail(errc::invalid_argument, "line directions must be unit");
  if (std::abs(l2.signed_dist(p)) > 1e-7 * (1.0 + norm(p - l2.origin)))
    fail(errc::invalid_argument, "p not on l2");
  Vec2 n = -perp(l2.direction);       // right normal of l2: away from table
  Vec2 n1 = perp(l1.direction);       // left normal of l1: toward table side
  double s0 = l1.signed_dist(p);
  if (s0 <= 0.0)
    fail(errc::no_solution, "tangency point on the wrong side of l1");
  Vec2 ndiff = n - n1;
  double one_minus_c = 0.5 * norm2(ndiff);
  if (one_minus_c <= scale_tol)
    fail(errc::no_solution, "support lines do not admit a tangent circle");
  double t = s0 / one_minus_c;
  return {p + t * n, t};
}

// ---------------------------------------------------------------------------
// third support line

struct ThirdSupportLine {
  DirectedLine line;          // table on the left
  std::size_t contact_vertex;
};

namespace detail {

// Tangent lines to C through an exterior point v (two), or the tangent at v
// if v lies on the circle.  Returned directions are unit, unoriented.
inline int tangent_directions(Point2 v, const Circle& C, Vec2 out[2],
                              double tol) {
  Vec2 w = C.center - v;
  double L = norm(w);
  if (std::abs(L - C.radius) <= tol) {
    out[0] = normalized(perp(w));
    return 1;
  }
  if (L <= C.radius) return 0;  // inside
  double sinphi = C.radius / L;
  double cosphi = std::sqrt(std::max(0.0, 1.0 - sinphi * sinphi));
  Vec2 u = w / L;
  Vec2 up = perp(u);
  out[0] = normalized(cosphi * u + sinphi * up);
  out[1] = normalized(cosphi * u - sinphi * up);
  return 2;
}

}  // namespace detail

// All common support lines of circle C and table P that keep both bodies on
// the same (left) side, excluding any line in `exclude`.  Brute force over
// vertex tangents; tables are small.
inline std::vector<ThirdSupportLine> common_support_lines(
    const ConvexPolygon& P, const Circle& C,
    const std::vector<DirectedLine>& exclude) {
  const auto& vs = P.vertices();
  const double tol = kGeomTol * std::max(P.diameter(), C.radius);
  std::vector<ThirdSupportLine> found;

  for (std::size_t i = 0; i < vs.size(); ++i) {
    Vec2 dirs[2];
    int nd = detail::tangent_directions(vs[i], C, dirs, tol);
    for (int k = 0; k < nd; ++k) {
      DirectedLine cand{vs[i], dirs[k]};
      // all vertices on one closed side
      double lo = 0.0, hi = 0.0;
      for (auto& v : vs) {
        double s = cand.signed_dist(v);
        lo = std::min(lo, s);
        hi = std::max(hi, s);
      }
      bool table_left, ok;
      if (lo >= -tol) { table_left = true; ok = true; }
      else if (hi <= tol) { table_left = false; ok = true; }
      else { ok = false; table_left = false; }
      if (!ok) continue;
      if (!table_left) cand.direction = -cand.direction;
      // same closed side for the circle body
      if (cand.signed_dist(C.center) < -tol) continue;
      bool skip = false;
      for (auto& e : exclude)
        if (same_line(cand, e, 10 * tol)) { skip = true; break; }
      for (auto& f : found)
        if (same_line(cand, f.line, 10 * tol)) { skip = true; break; }
      if (!skip) found.push_back({cand, i});
    }
  }
  return found;
}

// The unique remaining common support line of the construction.
inline ThirdSupportLine third_support_line(const ConvexPolygon& P,
                                           const Circle& C,
                                           const DirectedLine& exclude1,
                                           const DirectedLine& exclude2) {
  auto found = common_support_lines(P, C, {exclude1, exclude2});
  if (found.empty()) fail(errc::not_found, "no third support line");
  if (found.size() > 1) fail(errc::ambiguous, "multiple third support lines");
  return found.front();
}

// ---------------------------------------------------------------------------
// polygon metrics

struct PolygonMetrics {
  double diameter = 0.0;
  double perimeter = 0.0;
  double min_width = 0.0;
  double aspect_ratio = 1.0;  // diameter / min_width
  bool contains_origin = false;
};

inline PolygonMetrics polygon_metrics(const ConvexPolygon& P) {
  PolygonMetrics m;
  m.diameter = P.diameter();
  m.perimeter = P.perimeter();
  // Minimum width is attained with one side flush: min over edges of the
  // farthest vertex distance to the edge line.
  double w = std::numeric_limits<double>::infinity();
  const auto& vs = P.vertices();
  for (std::size_t i = 0; i < vs.size(); ++i) {
    DirectedLine e = DirectedLine::through(vs[i], P.vertex(i + 1));
    double far = 0.0;
    for (auto& v : vs) far = std::max(far, std::abs(e.signed_dist(v)));
    w = std::min(w, far);
  }
  m.min_width = w;
  m.aspect_ratio = (w > 0.0) ? m.diameter / w
                             : std::numeric_limits<double>::infinity();
  m.contains_origin = P.contains({0.0, 0.0});
  return m;
}

// ---------------------------------------------------------------------------
// ellipses by foci

struct EllipseFoci {
  Point2 f1;
  Point2 f2;
  double focal_sum;  // > |f1 - f2|

  EllipseFoci(Point2 a, Point2 b, double sum) : f1(a), f2(b), focal_sum(sum) {
    require_finite(a, "EllipseFoci");
    require_finite(b, "EllipseFoci");
    if (!(sum > dist(a, b)))
      fail(errc::invalid_argument, "focal_sum must exceed focal distance");
  }

  Point2 center() const { return 0.5 * (f1 + f2); }
  double semi_major() const { return 0.5 * focal_sum; }
  double linear_eccentricity() const { return 0.5 * dist(f1, f2); }
  double semi_minor() const {
    double a = semi_major(), c = linear_eccentricity();
    return std::sqrt(std::max(0.0, a * a - c * c));
  }
  double eccentricity() const { return linear_eccentricity() / semi_major(); }

  // Unit major-axis direction (arbitrary for circles).
  Vec2 axis() const {
    Vec2 d = f2 - f1;
    double n = norm(d);
    return n > 0.0 ? d / n : Vec2{1.0, 0.0};
  }

  Point2 point_at(double t) const {
    Vec2 u = axis(), v = perp(u);
    return center() + (semi_major() * std::cos(t)) * u +
           (semi_minor() * std::sin(t)) * v;
  }

  bool contains(Point2 p, double tol = 0.0) const {
    return dist(p, f1) + dist(p, f2) <= focal_sum + tol;
  }
};

inline double focal_sum_at(Point2 f1, Point2 f2, Point2 x) {
  return dist(x, f1) + dist(x, f2);
}

namespace detail {

// One bounded 1-D minimization of a smooth 2*pi-periodic function via golden
// section inside [lo, hi].
template <class F>
inline double golden_min(F&& f, double lo, double hi, int iters = 96) {
  const double g = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 < f2) { b = x2; x2 = x1; f2 = f1; x1 = b - g * (b - a); f1 = f(x1); }
    else         { a = x1; x1 = x2; f1 = f2; x2 = a + g * (b - a); f2 = f(x2); }
  }
  return 0.5 * (a + b);
}

}  // namespace detail

// Minimum and maximum distance from the origin to points of E, via a coarse
// angular scan refined by golden-section around the best cells, with the
// four axis crossings seeded explicitly.
inline std::pair<double, double> ellipse_radial_extremes(const EllipseFoci& E,
                                                         int grid = 512) {
  auto r = [&](double t) { return norm(E.point_at(t)); };
  const double two_pi = 2.0 * M_PI;
  double best_min = std::numeric_limits<double>::infinity(), tmin = 0.0;
  double best_max = -1.0, tmax = 0.0;
  for (int i = 0; i < grid; ++i) {
    double t = two_pi * i / grid;
    double v = r(t);
    if (v < best_min) { best_min = v; tmin = t; }
    if (v > best_max) { best_max = v; tmax = t; }
  }
  for (double seed : {0.0, 0.5 * M_PI, M_PI, 1.5 * M_PI}) {
    double v = r(seed);
    if (v < best_min) { best_min = v; tmin = seed; }
    if (v > best_max) { best_max = v; tmax = seed; }
  }
  double h = two_pi / grid;
  double t1 = detail::golden_min(r, tmin - h, tmin + h);
  double t2 = detail::golden_min([&](double t) { return -r(t); }, tmax - h, tmax + h);
  return {std::min(best_min, r(t1)), std::max(best_max, r(t2))};
}

// Distance from q to the ellipse boundary.  Newton on the stationarity
// condition in the parametric angle, multi-seeded, bisection fallback.
inline double point_to_ellipse_distance(const EllipseFoci& E, Point2 q,
                                        int max_iter = 64) {
  Vec2 u = E.axis(), v = perp(u);
  Point2 c = E.center();
  double A = E.semi_major(), B = E.semi_minor();
  double px = dot(q - c, u), py = dot(q - c, v);

  auto dist2 = [&](double t) {
    double dx = A * std::cos(t) - px, dy = B * std::sin(t) - py;
    return dx * dx + dy * dy;
  };
  // g(t) = d/dt dist2 / 2
  auto g = [&](double t) {
    double ct = std::cos(t), st = std::sin(t);
    return (A * ct - px) * (-A * st) + (B * st - py) * (B * ct);
  };

  double best = std::numeric_limits<double>::infinity();
  double seed0 = std::atan2(py * A, px * B);  // exact for axis-aligned q
  for (int k = 0; k < 8; ++k) {
    double t = seed0 + k * (M_PI / 4.0);
    for (int it = 0; it < max_iter; ++it) {
      double ct = std::cos(t), st = std::sin(t);
      double g1 = (A * ct - px) * (-A * st) + (B * st - py) * (B * ct);
      double g2 = (A * ct - px) * (-A * ct) + A * A * st * st +
                  (B * st - py) * (-B * st) + B * B * ct * ct;
      if (std::abs(g2) < 1e-300) break;
      double step = g1 / g2;
      if (!std::isfinite(step) || std::abs(step) > 0.5) {
        // bisection fallback over a bracketing interval
        double lo = t - 0.5, hi = t + 0.5;
        if (g(lo) * g(hi) > 0.0) break;
        for (int b = 0; b < max_iter; ++b) {
          double mid = 0.5 * (lo + hi);
          if (g(lo) * g(mid) <= 0.0) hi = mid; else lo = mid;
        }
        t = 0.5 * (lo + hi);
        break;
      }
      t -= step;
      if (std::abs(step) < 1e-15) break;
    }
    best = std::min(best, dist2(t));
  }
  return std::sqrt(best);
}

// Symmetric Hausdorff distance between two ellipse boundaries, estimated by
// dense sampling with exact per-point distance refinement.
inline double ellipse_hausdorff(const EllipseFoci& E1, const EllipseFoci& E2,
                                int samples = 512) {
  if (samples < 256) fail(errc::invalid_argument, "need samples >= 256");
  double sup12 = 0.0, sup21 = 0.0;
  for (int i = 0; i < samples; ++i) {
    double t = 2.0 * M_PI * i / samples;
    sup12 = std::max(sup12, point_to_ellipse_distance(E2, E1.point_at(t)));
    sup21 = std::max(sup21, point_to_ellipse_distance(E1, E2.point_at(t)));
  }
  return std::max(sup12, sup21);
}

}  // namespace olb
