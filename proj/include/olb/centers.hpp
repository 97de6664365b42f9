#pragma once

// The auxiliary-circle-center map chi, the reverse-engineered chord
// construction, the perpendicular-bisector witness, and the dual-curve
// deviation experiment.

#include <optional>
#include <vector>

#include "olb/asymptotics.hpp"

namespace olb {

struct CenterSample {
  Point2 x;
  Point2 center;     // chi(x)
  double radius;     // rho
  double phi;        // opening angle between the two support lines at x
  Point2 tangency;
};

inline CenterSample chi(const ConvexPolygon& P, Point2 x) {
  StepRecord rec = step(P, x);
  double phi = angle_at(x, P.vertex(rec.left_vertex), P.vertex(rec.right_vertex));
  return {x, rec.circle.center, rec.circle.radius, phi, rec.tangency};
}

// ---------------------------------------------------------------------------
// reverse-engineering the chord from a center

struct CenterChord {
  Point2 x;
  Point2 y;
  Circle circle;
  std::size_t tangency_vertex;
};

// Build the circle centered at c through the nearest vertex of P, find its
// three common support lines with P, and return the two of their pairwise
// intersections lying on the tangent line at that vertex, ordered so that
// step(P, x).y == y.
inline CenterChord chord_from_center(const ConvexPolygon& P, Point2 c) {
  require_finite(c, "chord_from_center");
  if (P.contains(c)) fail(errc::point_inside, "chord_from_center");
  auto prox = P.boundary_proximity(c);
  if (prox.nearest_on_edge)
    fail(errc::nearest_point_on_edge, "nearest boundary point lies inside a side");
  const Point2 v = P.vertex(prox.nearest_vertex);
  Circle circle{c, dist(c, v)};
  if (circle.radius <= kGeomTol * P.diameter())
    fail(errc::numerical_degeneracy, "center on the boundary");

  // tangent line at v, oriented with the table on the left
  DirectedLine tangent{v, normalized(perp(c - v))};
  const double tol = kGeomTol * std::max(P.diameter(), circle.radius);
  {
    double lo = 0.0;
    for (auto& q : P.vertices()) lo = std::min(lo, tangent.signed_dist(q));
    if (lo < -tol) tangent.direction = -tangent.direction;
  }

  auto outer = common_support_lines(P, circle, {tangent});
  if (outer.size() != 2)
    fail(errc::numerical_degeneracy, "expected exactly two outer support lines");

  Point2 i1 = intersect_or_fail(tangent, outer[0].line);
  Point2 i2 = intersect_or_fail(tangent, outer[1].line);
  // order (x, y) so that the table is on the left traveling x -> v -> y
  Point2 inside = P.vertex_centroid();
  CenterChord out;
  out.circle = circle;
  out.tangency_vertex = prox.nearest_vertex;
  if (cross(i2 - i1, inside - i1) > 0.0) {
    out.x = i1;
    out.y = i2;
  } else {
    out.x = i2;
    out.y = i1;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Proposition "mid": perpendicular-bisector witness

struct BisectorWitness {
  Point2 midpoint;
  std::size_t v_plus;   // vertex nearest the forward center
  std::size_t v_minus;  // vertex nearest the reverse center
  double defect;        // | |M v+| - |M v-| |
  bool degenerate;      // v_plus == v_minus or equidistant tie
};

inline BisectorWitness midpoint_bisector_witness(const ConvexPolygon& P,
                                                 Point2 x) {
  StepRecord fwd = step(P, x);
  StepRecord rev = step_inverse(P, x);
  Point2 cp = fwd.circle.center, cm = rev.circle.center;
  Point2 M = 0.5 * (cp + cm);

  auto nearest = [&](Point2 q, bool& tie) {
    std::size_t best = 0;
    double bd = std::numeric_limits<double>::infinity(), second = bd;
    for (std::size_t i = 0; i < P.size(); ++i) {
      double d = dist(q, P.vertex(i));
      if (d < bd) { second = bd; bd = d; best = i; }
      else second = std::min(second, d);
    }
    tie = (second - bd) <= kGeomTol * P.diameter();
    return best;
  };
  bool tie_p = false, tie_m = false;
  BisectorWitness w;
  w.midpoint = M;
  w.v_plus = nearest(cp, tie_p);
  w.v_minus = nearest(cm, tie_m);
  w.defect = std::abs(dist(M, P.vertex(w.v_plus)) - dist(M, P.vertex(w.v_minus)));
  w.degenerate = tie_p || tie_m || (w.v_plus == w.v_minus);
  return w;
}

// ---------------------------------------------------------------------------
// Theorem "centers": chi-cloud vs the rotated dual curve

struct DualDeviation {
  double sup_dev = 0.0;
  double max_phi_defect = 0.0;     // sup |phi - w(theta)|
  double max_radius_defect = 0.0;  // sup |rho - 2/w(theta)|
  std::vector<std::pair<double, double>> curve;  // (theta, Gamma(theta))
  std::vector<Point2> centers;
  std::optional<std::size_t> wrap_index;
};

// K must have diameter 1 and contain the origin; the table is d*K and the
// orbit starts on the unit circle at angle theta0.
inline DualDeviation dual_deviation(const ConvexPolygon& K, double d,
                                    double theta0, std::size_t cap = 400000) {
  if (std::abs(K.diameter() - 1.0) > 1e-9)
    fail(errc::invalid_argument, "K must have diameter 1");
  if (!K.contains({0.0, 0.0}))
    fail(errc::origin_outside, "K must contain the origin");
  const double c2 = 4.0 * M_PI + 11.0;
  if (!(d > 0.0) || d >= 1.0 / c2)
    fail(errc::d_too_large, "need 0 < d < 1/C2");

  ConvexPolygon Q = K.scaled(d);
  Point2 x0{std::cos(theta0), std::sin(theta0)};
  OnceAroundOrbit o = once_around(Q, x0, cap);
  if (o.failure) fail(errc::numerical_degeneracy, "once-around run failed");

  DualDeviation out;
  out.wrap_index = o.wrap_index;
  for (auto& s : o.samples) {
    if (!s.record) continue;
    double theta = polar_angle(s.point);
    double w = width(Q, theta);
    double gamma = 2.0 / w;
    Point2 target = gamma * Point2{-std::sin(theta), std::cos(theta)};
    Point2 center = s.record->circle.center;
    out.sup_dev = std::max(out.sup_dev, dist(center, target));
    double phi = angle_at(s.point, Q.vertex(s.record->left_vertex),
                          Q.vertex(s.record->right_vertex));
    out.max_phi_defect = std::max(out.max_phi_defect, std::abs(phi - w));
    out.max_radius_defect =
        std::max(out.max_radius_defect, std::abs(s.record->circle.radius - gamma));
    out.curve.push_back({theta, gamma});
    out.centers.push_back(center);
  }
  return out;
}

}  // namespace olb
