#pragma once

// Extouch triangles: the direct construction via tangent lengths, the
// inverse solver recovering a parent triangle from its extouch triangle, and
// planar placement certifying the 3-periodic orbit.

#include <array>
#include <tuple>

#include "olb/billiard.hpp"

namespace olb {

using Triangle = std::array<Point2, 3>;

struct TriangleSides {
  double a, b, c;  // a opposite vertex 0, etc.

  TriangleSides(double a_, double b_, double c_) : a(a_), b(b_), c(c_) {
    if (!(a > 0 && b > 0 && c > 0) ||
        !(a + b > c && b + c > a && c + a > b))
      fail(errc::invalid_argument, "side lengths violate the triangle inequality");
  }
};

inline TriangleSides sides_of(const Triangle& t) {
  return TriangleSides(dist(t[1], t[2]), dist(t[2], t[0]), dist(t[0], t[1]));
}

inline double triangle_area(const Triangle& t) {
  return 0.5 * std::abs(cross(t[1] - t[0], t[2] - t[0]));
}

// Tangency points of the three excircles with the triangle's sides.  Output
// vertex i lies on the side opposite input vertex i.  Tangent lengths: the
// excircle opposite vertex 0 touches side (1,2) at distance s-c from vertex
// 1 and s-b from vertex 2.
inline Triangle extouch_of(const Triangle& t) {
  TriangleSides sd = sides_of(t);  // also validates nondegeneracy
  double scale = std::max({sd.a, sd.b, sd.c});
  if (triangle_area(t) <= 1e-12 * scale * scale)
    fail(errc::degenerate, "collinear triangle");
  double s = 0.5 * (sd.a + sd.b + sd.c);
  Triangle e;
  e[0] = t[1] + ((s - sd.c) / sd.a) * (t[2] - t[1]);
  e[1] = t[2] + ((s - sd.a) / sd.b) * (t[0] - t[2]);
  e[2] = t[0] + ((s - sd.b) / sd.c) * (t[1] - t[0]);
  return e;
}

// ---------------------------------------------------------------------------
// inverse solver

struct ParentSolution {
  double x, y, z;
  double bracket_lo, bracket_hi;
  double residual;  // |f(x)| at the root
};

namespace detail {

// y(x) and z(x) from the pairwise side relations; independent of the area
// normalization.
inline double extouch_partner(double x, double a, double other) {
  double disc = x * x * x * x + 2.0 * (2.0 * other * other - a * a) * x * x +
                a * a * a * a;
  return (x * x - a * a + std::sqrt(disc)) / (2.0 * x);
}

}  // namespace detail

// Heron-matched area constant: 4 |R|^2 = yz (x^2 - a^2).  Validated against
// the direct extouch construction in the test suite.
inline constexpr double kExtouchAreaKappa = 4.0;

// Recover the parent side lengths (x, y, z) whose extouch triangle has sides
// (a, b, c).  Bracketed root of f(x) = yz(x^2-a^2) - kappa*Heron^2 on
// (a, inf); bisection with a secant acceleration per iteration.
inline ParentSolution solve_parent(const TriangleSides& T) {
  const double a = T.a, b = T.b, c = T.c;
  auto f = [&](double x) {
    double y = detail::extouch_partner(x, a, b);
    double z = detail::extouch_partner(x, a, c);
    double S = 0.5 * (x + y + z);
    return y * z * (x * x - a * a) -
           kExtouchAreaKappa * S * (S - x) * (S - y) * (S - z);
  };

  double lo = a * (1.0 + 1e-12);
  double hi = 2.0 * a;
  double flo = f(lo);
  double fhi = f(hi);
  int grow = 0;
  while (fhi <= 0.0) {
    hi *= 2.0;
    fhi = f(hi);
    if (++grow > 200) fail(errc::bracket_failure, "f stayed non-positive");
  }
  if (flo >= 0.0) fail(errc::bracket_failure, "f(a+) not negative");

  ParentSolution sol{0, 0, 0, lo, hi, 0};
  for (int it = 0; it < 200 && (hi - lo) > 1e-13 * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    // secant acceleration when it lands strictly inside the bracket
    double sec = lo - flo * (hi - lo) / (fhi - flo);
    if (sec > lo + 0.01 * (hi - lo) && sec < hi - 0.01 * (hi - lo)) mid = sec;
    double fm = f(mid);
    if (fm < 0.0) { lo = mid; flo = fm; }
    else          { hi = mid; fhi = fm; }
  }
  double x = 0.5 * (lo + hi);
  sol.x = x;
  sol.y = detail::extouch_partner(x, a, b);
  sol.z = detail::extouch_partner(x, a, c);
  sol.residual = std::abs(f(x));
  return sol;
}

// ---------------------------------------------------------------------------
// planar placement and the 3-periodic orbit certificate

struct PlacedParent {
  Triangle parent;      // registered in the plane around Q
  ParentSolution sides;
  double orbit_defect;  // max over parent vertices of |T^3(V) - V|
};

namespace detail {

inline Triangle triangle_from_sides(double x, double y, double z) {
  // vertex 0 at the origin, vertex 1 on the +x axis; side x opposite 0.
  double cx = (z * z + y * y - x * x) / (2.0 * z);
  double cy2 = y * y - cx * cx;
  if (cy2 <= 0.0) fail(errc::degenerate, "sides do not close a triangle");
  return Triangle{Point2{0, 0}, Point2{z, 0}, Point2{cx, std::sqrt(cy2)}};
}

}  // namespace detail

// Solve for the parent of Q, place it rigidly so its extouch points match
// Q's vertices, and measure the 3-periodicity defect of its vertices under
// the outer length billiard around Q.
inline PlacedParent place_parent(const Triangle& Q) {
  TriangleSides qs = sides_of(Q);
  ParentSolution ps = solve_parent(qs);
  Triangle canon = detail::triangle_from_sides(ps.x, ps.y, ps.z);
  Triangle canon_ext = extouch_of(canon);

  // Rigid registration of the canonical extouch points onto Q's vertices
  // (least-squares rotation about the centroids, optionally reflected); the
  // parent vertices ride along under the same motion.
  auto register_with = [&](bool reflect, Triangle& parent_out) {
    Point2 cs{0, 0}, cd{0, 0};
    for (int i = 0; i < 3; ++i) { cs = cs + canon_ext[i]; cd = cd + Q[i]; }
    cs = cs / 3.0; cd = cd / 3.0;
    double num = 0.0, den = 0.0;
    for (int i = 0; i < 3; ++i) {
      Vec2 s = canon_ext[i] - cs;
      if (reflect) s.y = -s.y;
      Vec2 t = Q[i] - cd;
      num += cross(s, t);
      den += dot(s, t);
    }
    double theta = std::atan2(num, den);
    double resid = 0.0;
    for (int i = 0; i < 3; ++i) {
      Vec2 s = canon_ext[i] - cs;
      if (reflect) s.y = -s.y;
      resid += norm2(cd + rotated(s, theta) - Q[i]);
    }
    for (int i = 0; i < 3; ++i) {
      Vec2 s = canon[i] - cs;
      if (reflect) s.y = -s.y;
      parent_out[i] = cd + rotated(s, theta);
    }
    return resid;
  };
  Triangle parent_a, parent_b;
  double ra = register_with(false, parent_a);
  double rb = register_with(true, parent_b);

  PlacedParent out;
  out.sides = ps;
  out.parent = (ra <= rb) ? parent_a : parent_b;

  // 3-periodic orbit defect around Q
  std::vector<Point2> qv{Q[0], Q[1], Q[2]};
  if (cross(qv[1] - qv[0], qv[2] - qv[0]) < 0.0) std::swap(qv[1], qv[2]);
  ConvexPolygon table(qv);
  out.orbit_defect = 0.0;
  for (int i = 0; i < 3; ++i) {
    Point2 w = out.parent[i];
    for (int k = 0; k < 3; ++k) w = step(table, w).y;
    out.orbit_defect = std::max(out.orbit_defect, dist(w, out.parent[i]));
  }
  return out;
}

}  // namespace olb
