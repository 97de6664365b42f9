#pragma once

// The outer length billiard map T around a convex polygon, its inverse, the
// 2-gon closed form, the outer area map, and the variational criticality
// check.
//
// Construction (forward step at x): the two support lines through x are l1
// (through the left contact, as seen from x facing the table) and l2
// (through the right contact p).  The auxiliary circle is tangent to l2 at p
// and to l1, on the far side of l2.  l3 is the remaining common support line
// of circle and table; y = l2 cap l3.  x, p, y are collinear in that order.
//
// Orientation facts pinned by tests: r_i = l_{i+1}, steadiness l_i = r_{i+1}
// (equivalently: the third line touches the left vertex), and the squared
// map drifts clockwise far from the table.

#include <optional>
#include <vector>

#include "olb/geom.hpp"

namespace olb {

struct StepRecord {
  Point2 x;
  Point2 y;
  DirectedLine l1, l2, l3;  // table on the left of each
  Point2 tangency;          // the vertex p carried by l2
  Circle circle;
  std::size_t left_vertex = 0;   // contact of l1
  std::size_t right_vertex = 0;  // contact of l2 (tangency)
  std::size_t third_vertex = 0;  // contact of l3
  bool steady = false;           // third_vertex == left_vertex
  // virtual_table[1] is always the tangency vertex; virtual_table[0] is the
  // left vertex when steady, else l1 cap l3.
  Point2 virtual_table[2];

  // 0-based (i, j, k): vertices carried by l1, l2, l3.
  std::size_t piece_i() const { return left_vertex; }
  std::size_t piece_j() const { return right_vertex; }
  std::size_t piece_k() const { return third_vertex; }
};

namespace detail {

inline SupportContacts map_contacts(const ConvexPolygon& P, Point2 x) {
  try {
    return support_contacts(P, x);
  } catch (const error& e) {
    if (e.code() == errc::on_singular_ray)
      fail(errc::singular, "x on a map-singular ray");
    if (e.code() == errc::edge_aligned)
      fail(errc::numerical_degeneracy, "contact label ambiguous on side extension");
    throw;
  }
}

}  // namespace detail

inline StepRecord step(const ConvexPolygon& P, Point2 x) {
  require_finite(x, "step");
  const double d = P.diameter();
  const double tol = kGeomTol * d;

  SupportContacts sc = detail::map_contacts(P, x);
  Point2 vl = P.vertex(sc.left);
  Point2 vr = P.vertex(sc.right);

  StepRecord rec;
  rec.x = x;
  rec.left_vertex = sc.left;
  rec.right_vertex = sc.right;
  rec.tangency = vr;
  rec.l1 = DirectedLine{vl, normalized(x - vl)};
  rec.l2 = DirectedLine{vr, normalized(vr - x)};

  rec.circle = auxiliary_circle(rec.l1, rec.l2, vr);
  if (rec.circle.radius < 1e-12 * d)
    fail(errc::numerical_degeneracy, "auxiliary circle collapses");

  auto third = third_support_line(P, rec.circle, rec.l1, rec.l2);
  rec.l3 = third.line;
  rec.third_vertex = third.contact_vertex;

  rec.y = intersect_or_fail(rec.l2, rec.l3);
  // p strictly between x and y on l2
  double ty = rec.l2.project(rec.y);
  if (!(ty > tol) || !finite(rec.y))
    fail(errc::numerical_degeneracy, "image does not lie beyond the tangency vertex");

  rec.steady = (rec.third_vertex == rec.left_vertex);
  rec.virtual_table[1] = vr;
  rec.virtual_table[0] =
      rec.steady ? vl : intersect_or_fail(rec.l1, rec.l3);
  return rec;
}

// Reverse map, returned as the forward record of the preimage: the record's
// x is T^-1(z), its y is z, and its circle is the one the reverse
// construction at z uses (tangent to the l2 line at the left contact of z).
inline StepRecord step_inverse(const ConvexPolygon& P, Point2 z) {
  require_finite(z, "step_inverse");
  const double d = P.diameter();
  const double tol = kGeomTol * d;

  SupportContacts sc;
  try {
    sc = support_contacts(P, z);
  } catch (const error& e) {
    if (e.code() == errc::edge_aligned)
      fail(errc::singular, "z on a reverse-singular ray");
    if (e.code() == errc::on_singular_ray)
      fail(errc::numerical_degeneracy, "contact label ambiguous on side extension");
    throw;
  }
  Point2 vl = P.vertex(sc.left);   // tangency of the reverse circle
  Point2 vr = P.vertex(sc.right);  // carries the forward l3

  // Forward-l2 line through z and the left contact; forward-l3 through the
  // right contact, table kept on the left of both.
  DirectedLine m2{vl, normalized(z - vl)};
  DirectedLine m1{vr, normalized(vr - z)};

  Circle c = auxiliary_circle(m1, m2, vl);
  if (c.radius < 1e-12 * d)
    fail(errc::numerical_degeneracy, "auxiliary circle collapses");

  auto third = third_support_line(P, c, m1, m2);

  Point2 x = intersect_or_fail(m2, third.line);
  double tx = m2.project(x);
  double tz = m2.project(z);
  if (!(tx < -tol) || !(tz > tol) || !finite(x))
    fail(errc::numerical_degeneracy, "preimage does not lie before the tangency vertex");

  StepRecord rec;
  rec.x = x;
  rec.y = z;
  rec.left_vertex = third.contact_vertex;
  rec.right_vertex = sc.left;
  rec.third_vertex = sc.right;
  rec.tangency = vl;
  rec.l1 = DirectedLine{P.vertex(third.contact_vertex),
                        normalized(x - P.vertex(third.contact_vertex))};
  rec.l2 = DirectedLine{vl, normalized(z - vl)};
  rec.l3 = m1;
  rec.circle = c;
  rec.steady = (rec.third_vertex == rec.left_vertex);
  rec.virtual_table[1] = vl;
  rec.virtual_table[0] = rec.steady ? P.vertex(rec.left_vertex)
                                    : intersect_or_fail(rec.l1, rec.l3);
  return rec;
}

// ---------------------------------------------------------------------------
// orbits

enum class StopReason {
  completed,      // n_max steps taken
  singular,
  escaped,        // |x| exceeded stop_radius
  point_inside,
  numerical,
};

inline const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::completed:    return "completed";
    case StopReason::singular:     return "singular";
    case StopReason::escaped:      return "escaped";
    case StopReason::point_inside: return "point_inside";
    case StopReason::numerical:    return "numerical";
  }
  return "unknown";
}

struct OrbitSample {
  std::size_t index = 0;
  Point2 point;
  std::optional<StepRecord> record;  // the step taken from this point
};

struct Orbit {
  std::vector<OrbitSample> samples;
  StopReason reason = StopReason::completed;
};

inline Orbit orbit(const ConvexPolygon& P, Point2 x0, std::size_t n_max,
                   double stop_radius) {
  Orbit o;
  if (P.contains(x0)) {
    o.reason = StopReason::point_inside;
    return o;
  }
  Point2 x = x0;
  o.samples.push_back({0, x, std::nullopt});
  for (std::size_t i = 0; i < n_max; ++i) {
    if (norm(x) > stop_radius) {
      o.reason = StopReason::escaped;
      return o;
    }
    StepRecord rec;
    try {
      rec = step(P, x);
    } catch (const error& e) {
      o.reason = (e.code() == errc::singular || e.code() == errc::point_inside)
                     ? StopReason::singular
                     : StopReason::numerical;
      if (e.code() == errc::point_inside) o.reason = StopReason::point_inside;
      return o;
    }
    o.samples.back().record = rec;
    x = rec.y;
    o.samples.push_back({i + 1, x, std::nullopt});
  }
  o.reason = StopReason::completed;
  return o;
}

// ---------------------------------------------------------------------------
// 2-gon closed form

// Step around the segment table with endpoints f1, f2: y is the second
// intersection of the focal chord through x and the right contact with the
// ellipse through x having foci f1, f2.
inline Point2 segment_step(Point2 f1, Point2 f2, Point2 x) {
  require_finite(x, "segment_step");
  Vec2 e = f2 - f1;
  double L = norm(e);
  if (L == 0.0) fail(errc::invalid_argument, "coincident foci");
  if (std::abs(cross(e, x - f1)) / L <= kGeomTol * L)
    fail(errc::collinear, "x collinear with the segment");

  Vec2 u1 = f1 - x, u2 = f2 - x;
  Point2 fr = (cross(u1, u2) > 0.0) ? f1 : f2;  // right contact: other focus on its left

  EllipseFoci E(f1, f2, focal_sum_at(f1, f2, x));
  Vec2 ax = E.axis(), axp = perp(ax);
  Point2 c = E.center();
  double A = E.semi_major(), B = E.semi_minor();
  double px = dot(x - c, ax), py = dot(x - c, axp);
  Vec2 dir = normalized(fr - x);
  double dx = dot(dir, ax), dy = dot(dir, axp);
  // x is on E, so the quadratic in t has a root at 0; the other root:
  double qa = dx * dx / (A * A) + dy * dy / (B * B);
  double qb = 2.0 * (px * dx / (A * A) + py * dy / (B * B));
  double t = -qb / qa;
  return x + t * dir;
}

// ---------------------------------------------------------------------------
// outer area billiard baseline

// y = 2p - x, reflecting through the right contact (the support vertex with
// the table on the left when moving from x toward it).
inline Point2 outer_area_step(const ConvexPolygon& P, Point2 x) {
  require_finite(x, "outer_area_step");
  if (P.contains(x)) fail(errc::point_inside, "outer_area_step");
  const auto& vs = P.vertices();
  const double tol = kGeomTol * P.diameter();
  for (std::size_t i = 0; i < vs.size(); ++i) {
    Vec2 u = vs[i] - x;
    double un = norm(u);
    if (un <= tol) fail(errc::point_inside, "x coincides with a vertex");
    bool all_left = true, aligned = false;
    for (std::size_t j = 0; j < vs.size(); ++j) {
      if (j == i) continue;
      Vec2 w = vs[j] - x;
      double cs = cross(u, w) / un;
      if (cs < -tol) { all_left = false; break; }
      if (cs <= tol && dot(u, w) > 0.0) aligned = true;
    }
    if (!all_left) continue;
    if (aligned) fail(errc::singular, "x sees a whole edge");
    return 2.0 * vs[i] - x;
  }
  fail(errc::numerical_degeneracy, "no support vertex found");
}

// ---------------------------------------------------------------------------
// variational criticality

// |dL/dphi| at phi = 0 for the 3-segment broken line A -> c1 -> c2 -> B,
// where the middle support line rotates by phi about its tangency vertex and
// the neighbouring support lines stay fixed.  A is x itself; B is the
// contact vertex of the outgoing line.  Central differences with one
// Richardson refinement.  `offset` evaluates the derivative away from the
// critical configuration.
inline double variational_residual(const ConvexPolygon& P, Point2 x,
                                   double h = 1e-5, double offset = 0.0) {
  if (h <= 0.0) fail(errc::invalid_argument, "h must be positive");
  StepRecord s0 = step(P, x);
  StepRecord s1 = step(P, s0.y);

  const DirectedLine lam0 = s0.l2;
  const DirectedLine lam2 = s1.l3;
  const Point2 pivot = s1.tangency;
  const Vec2 dmid = s1.l2.direction;
  const Point2 A = x;
  const Point2 B = P.vertex(s1.third_vertex);

  auto broken_length = [&](double phi) {
    DirectedLine mid{pivot, rotated(dmid, phi)};
    Point2 c1 = intersect_or_fail(lam0, mid);
    Point2 c2 = intersect_or_fail(mid, lam2);
    return dist(A, c1) + dist(c1, c2) + dist(c2, B);
  };
  auto deriv = [&](double e) {
    return (broken_length(offset + e) - broken_length(offset - e)) / (2.0 * e);
  };
  double d1 = deriv(h);
  double d2 = deriv(0.5 * h);
  return std::abs((4.0 * d2 - d1) / 3.0);
}

}  // namespace olb
