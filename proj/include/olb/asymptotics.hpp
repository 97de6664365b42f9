#pragma once

// Once-around orbits and the far-field machinery: annulus bound, steadiness
// census, steady-phase ellipses, width/support functions, Minkowski
// symmetrization and the polar-dual curve, and the outer-area necklace fit.

#include <optional>
#include <vector>

#include "olb/billiard.hpp"
#include "olb/singularity.hpp"

namespace olb {

namespace detail {
// wrap to [-pi, pi)
inline double wrap_angle(double a) {
  a = std::fmod(a + M_PI, 2.0 * M_PI);
  if (a < 0.0) a += 2.0 * M_PI;
  return a - M_PI;
}
}  // namespace detail

// ---------------------------------------------------------------------------
// once-around orbit

struct OnceAroundOrbit {
  std::vector<OrbitSample> samples;  // x_0 .. x_2N, records attached
  std::optional<std::size_t> wrap_index;  // N
  double start_radius = 0.0;
  double reference_angle = 0.0;
  std::optional<StopReason> failure;  // set when wrap was not reached
  ConvexPolygon table;
  PolygonMetrics metrics;

  double frame_angle(Point2 p) const {
    return detail::wrap_angle(polar_angle(p) - reference_angle);
  }
};

// Iterate T^2 in the frame where x sits at angle zero, stopping at the first
// even iterate whose argument drops to <= 0 after a positive predecessor.
inline OnceAroundOrbit once_around(const ConvexPolygon& P, Point2 x,
                                   std::size_t cap = 200000) {
  if (!P.is_segment() && !P.contains({0.0, 0.0}))
    fail(errc::origin_outside, "once_around expects the origin inside the table");
  OnceAroundOrbit o{{}, std::nullopt, norm(x), polar_angle(x), std::nullopt, P,
                    polygon_metrics(P)};

  Point2 cur = x;
  o.samples.push_back({0, cur, std::nullopt});
  double prev_even_arg = 0.0;
  for (std::size_t k = 1; k <= cap; ++k) {
    for (int half = 0; half < 2; ++half) {
      StepRecord rec;
      try {
        rec = step(P, cur);
      } catch (const error& e) {
        o.failure = (e.code() == errc::singular) ? StopReason::singular
                                                 : StopReason::numerical;
        return o;
      }
      o.samples.back().record = rec;
      cur = rec.y;
      o.samples.push_back({o.samples.size(), cur, std::nullopt});
    }
    double arg = o.frame_angle(cur);
    if (prev_even_arg > 0.0 && arg <= 0.0) {
      o.wrap_index = k;
      // the final sample still needs its step for the steadiness census
      try {
        o.samples.back().record = step(P, cur);
      } catch (const error&) {
      }
      return o;
    }
    prev_even_arg = arg;
  }
  o.failure = StopReason::completed;  // cap reached without wrap
  return o;
}

// ---------------------------------------------------------------------------
// annulus bound (Theorem "circle")

struct AnnulusStats {
  double max_dev = 0.0;
  double c1_bound = 0.0;  // 4p + 3d
  bool satisfied = false;
};

inline AnnulusStats annulus_stats(const OnceAroundOrbit& o) {
  if (!o.wrap_index) fail(errc::incomplete_orbit, "orbit did not wrap");
  AnnulusStats s;
  for (auto& smp : o.samples)
    s.max_dev = std::max(s.max_dev, std::abs(norm(smp.point) - o.start_radius));
  s.c1_bound = 4.0 * o.metrics.perimeter + 3.0 * o.metrics.diameter;
  s.satisfied = s.max_dev <= s.c1_bound;
  return s;
}

// ---------------------------------------------------------------------------
// steadiness census (Corollary on unsteady counts + Lemma crossings)

struct SteadinessCensus {
  std::size_t unsteady_count = 0;
  bool crossing_consistent = true;
  std::size_t checked_crossings = 0;
};

inline SteadinessCensus steadiness_census(const OnceAroundOrbit& o) {
  if (!o.wrap_index) fail(errc::incomplete_orbit, "orbit did not wrap");
  const double d = o.metrics.diameter;
  for (auto& s : o.samples)
    if (norm(s.point) < 8.0 * d)
      fail(errc::radius_too_small, "census needs all samples at radius >= 8d");

  SteadinessCensus c;
  for (auto& s : o.samples)
    if (s.record && !s.record->steady) ++c.unsteady_count;

  const auto rays = singular_rays(o.table, RayMode::all_extensions);
  const double tol = 1e-12;
  for (std::size_t i = 0; i + 2 < o.samples.size(); ++i) {
    const auto& rec = o.samples[i].record;
    if (!rec) continue;
    bool crossing = false;
    for (auto& r : rays)
      if (segment_crosses_ray(o.samples[i].point, o.samples[i + 2].point, r, tol)) {
        crossing = true;
        break;
      }
    ++c.checked_crossings;
    if (crossing != !rec->steady) c.crossing_consistent = false;
  }
  return c;
}

// Ellipse of the steady phase through x_i: foci at the virtual-table
// endpoints, focal sum measured at x_i.
inline EllipseFoci steady_ellipse(const ConvexPolygon& P, Point2 x) {
  StepRecord rec = step(P, x);
  return EllipseFoci(rec.virtual_table[0], rec.virtual_table[1],
                     focal_sum_at(rec.virtual_table[0], rec.virtual_table[1], x));
}

inline EllipseFoci steady_ellipse(const StepRecord& rec) {
  return EllipseFoci(rec.virtual_table[0], rec.virtual_table[1],
                     focal_sum_at(rec.virtual_table[0], rec.virtual_table[1], rec.x));
}

// ---------------------------------------------------------------------------
// support function, width, symmetrization, polar dual

inline double support(const ConvexPolygon& P, double theta) {
  if (!P.contains({0.0, 0.0}))
    fail(errc::origin_outside, "support function needs the origin inside");
  Vec2 u{std::cos(theta), std::sin(theta)};
  double h = -std::numeric_limits<double>::infinity();
  for (auto& v : P.vertices()) h = std::max(h, dot(v, u));
  return h;
}

// Width as seen from direction theta; translation invariant, period pi.
inline double width(const ConvexPolygon& P, double theta) {
  Vec2 u{std::cos(theta + M_PI / 2.0), std::sin(theta + M_PI / 2.0)};
  double hi = -std::numeric_limits<double>::infinity();
  double lo = std::numeric_limits<double>::infinity();
  for (auto& v : P.vertices()) {
    double s = dot(v, u);
    hi = std::max(hi, s);
    lo = std::min(lo, s);
  }
  return hi - lo;
}

// Radial function of the symplectic polar dual of the symmetrized table.
inline double dual_radial(const ConvexPolygon& P, double theta) {
  return 2.0 / width(P, theta);
}

struct WidthProfile {
  std::vector<double> theta;
  std::vector<double> h;
  std::vector<double> w;
};

inline WidthProfile width_profile(const ConvexPolygon& P, int samples = 4096) {
  WidthProfile wp;
  wp.theta.reserve(samples);
  for (int i = 0; i < samples; ++i) {
    double t = 2.0 * M_PI * i / samples;
    wp.theta.push_back(t);
    wp.h.push_back(support(P, t));
    wp.w.push_back(width(P, t));
  }
  return wp;
}

// Minkowski body (P + (-P))/2 as an explicit polygon: merge the edge vectors
// of P and -P by direction and walk them.  At most 2n vertices.
inline ConvexPolygon symmetrize(const ConvexPolygon& P) {
  const auto& vs = P.vertices();
  const std::size_t n = vs.size();
  if (n == 2) {
    Vec2 h = 0.5 * (vs[1] - vs[0]);
    return ConvexPolygon({-1.0 * h, h});
  }
  std::vector<Vec2> edges;
  edges.reserve(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    edges.push_back(P.vertex(i + 1) - vs[i]);
    edges.push_back(vs[i] - P.vertex(i + 1));
  }
  std::sort(edges.begin(), edges.end(), [](Vec2 a, Vec2 b) {
    return std::atan2(a.y, a.x) < std::atan2(b.y, b.x);
  });
  // merge parallel runs
  std::vector<Vec2> merged;
  for (auto& e : edges) {
    if (!merged.empty() &&
        std::abs(cross(normalized(merged.back()), normalized(e))) < 1e-12 &&
        dot(merged.back(), e) > 0.0)
      merged.back() = merged.back() + e;
    else
      merged.push_back(e);
  }
  std::vector<Point2> out;
  Point2 cur{0, 0};
  for (auto& e : merged) {
    out.push_back(cur);
    cur = cur + 0.5 * e;
  }
  // center at the origin (the symmetrized body is 0-symmetric)
  Point2 c{0, 0};
  for (auto& p : out) c = c + p;
  c = c / double(out.size());
  for (auto& p : out) p = p - c;
  return ConvexPolygon(std::move(out));
}

// ---------------------------------------------------------------------------
// distant outer-area orbits vs the dual curve

struct NecklaceFit {
  double deviation = 0.0;      // relative sup deviation at the fitted scale
  double scale = 0.0;          // homothety factor against dual_radial
  double rotation_diag = 0.0;  // best extra rotation (diagnostic only)
  std::size_t samples_used = 0;
};

// Run a distant outer-area orbit for one revolution of the squared map and
// fit radius(theta) = scale * dual_radial(theta) in least squares.
inline NecklaceFit area_necklace_compare(const ConvexPolygon& P, double radius,
                                         std::size_t max_samples = 100000) {
  if (!P.contains({0.0, 0.0}))
    fail(errc::origin_outside, "necklace fit needs the origin inside");
  std::vector<Point2> pts;
  Point2 z{radius, 0.0};
  double turned = 0.0;
  Point2 prev_even = z;
  pts.push_back(z);
  for (std::size_t k = 0; k < max_samples && turned < 2.0 * M_PI; ++k) {
    try {
      z = outer_area_step(P, z);
      pts.push_back(z);
      z = outer_area_step(P, z);
      pts.push_back(z);
    } catch (const error&) {
      break;
    }
    turned += std::abs(detail::wrap_angle(polar_angle(z) - polar_angle(prev_even)));
    prev_even = z;
  }

  auto fit_at = [&](double rot) {
    double num = 0.0, den = 0.0;
    for (auto& p : pts) {
      double g = dual_radial(P, polar_angle(p) - rot);
      num += norm(p) * g;
      den += g * g;
    }
    double c = num / den;
    double dev = 0.0;
    for (auto& p : pts) {
      double g = c * dual_radial(P, polar_angle(p) - rot);
      dev = std::max(dev, std::abs(norm(p) - g) / g);
    }
    return std::make_pair(dev, c);
  };

  NecklaceFit nf;
  auto [dev0, c0] = fit_at(0.0);
  nf.deviation = dev0;
  nf.scale = c0;
  nf.samples_used = pts.size();
  nf.rotation_diag = 0.0;
  double best = dev0;
  for (int k = -16; k <= 16; ++k) {
    double rot = k * (M_PI / 128.0);
    double dev = fit_at(rot).first;
    if (dev < best - 1e-12) {
      best = dev;
      nf.rotation_diag = rot;
    }
  }
  return nf;
}

}  // namespace olb
