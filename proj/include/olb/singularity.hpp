#pragma once

// Singular rays, escape-time rasterization of the singularity set, box
// counting, and the dense-orbit comparison.

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "olb/billiard.hpp"
#include "olb/parallel.hpp"

namespace olb {

enum class RayMode { map_singular, all_extensions };

// map_singular: for each CCW edge (v_i, v_i+1), the ray from v_i away from
// v_i+1 (the clockwise extension, where the tangency vertex jumps and T is
// undefined).  all_extensions adds the opposite extension of every side.
inline std::vector<Ray> singular_rays(const ConvexPolygon& P, RayMode mode) {
  const auto& vs = P.vertices();
  const double tol = kGeomTol * P.diameter();
  std::vector<Ray> rays;
  auto push_unique = [&](Ray r) {
    for (auto& q : rays)
      if (dist(q.origin, r.origin) <= tol &&
          norm(q.direction - r.direction) <= 1e-9)
        return;
    rays.push_back(r);
  };
  for (std::size_t i = 0; i < vs.size(); ++i) {
    Point2 a = vs[i], b = P.vertex(i + 1);
    push_unique({a, normalized(a - b)});
    if (mode == RayMode::all_extensions) push_unique({b, normalized(b - a)});
  }
  return rays;
}

inline double distance_to_rays(Point2 p, const std::vector<Ray>& rays) {
  double best = std::numeric_limits<double>::infinity();
  for (auto& r : rays) best = std::min(best, r.distance_to(p));
  return best;
}

// ---------------------------------------------------------------------------
// raster grid

struct RasterGrid {
  Point2 lo, hi;
  int nx = 0, ny = 0;
  std::vector<int16_t> depth;  // -1 unmarked, else first hit step

  static constexpr int16_t kUnmarked = -1;

  double cell_w() const { return (hi.x - lo.x) / nx; }
  double cell_h() const { return (hi.y - lo.y) / ny; }

  Point2 cell_center(int i, int j) const {
    return {lo.x + (i + 0.5) * cell_w(), lo.y + (j + 0.5) * cell_h()};
  }
  int16_t& at(int i, int j) { return depth[std::size_t(j) * nx + i]; }
  int16_t at(int i, int j) const { return depth[std::size_t(j) * nx + i]; }
  bool marked(int i, int j) const { return at(i, j) >= 0; }

  bool cell_of(Point2 p, int& i, int& j) const {
    i = int(std::floor((p.x - lo.x) / cell_w()));
    j = int(std::floor((p.y - lo.y) / cell_h()));
    return i >= 0 && i < nx && j >= 0 && j < ny;
  }

  std::size_t marked_count() const {
    std::size_t c = 0;
    for (auto d : depth) c += (d >= 0);
    return c;
  }
};

struct RasterParams {
  Point2 lo, hi;
  int nx = 512, ny = 512;
  int max_depth = 12;
  double epsilon = 0.0;  // 0 = half a cell diagonal
};

// For each cell center, iterate T and stamp the first step index at which
// the iterate comes within epsilon of a map-singular ray.  Cells inside the
// table stay unmarked; orbits leaving the window stop contributing.
inline RasterGrid raster(const ConvexPolygon& P, const RasterParams& prm) {
  RasterGrid g;
  g.lo = prm.lo;
  g.hi = prm.hi;
  g.nx = prm.nx;
  g.ny = prm.ny;
  if (g.nx < 16 || g.ny < 16) fail(errc::invalid_argument, "resolution >= 16");
  g.depth.assign(std::size_t(g.nx) * g.ny, RasterGrid::kUnmarked);

  const auto rays = singular_rays(P, RayMode::map_singular);
  const double eps = prm.epsilon > 0.0
                         ? prm.epsilon
                         : 0.5 * std::hypot(g.cell_w(), g.cell_h());
  auto in_window = [&](Point2 p) {
    return p.x >= prm.lo.x && p.x <= prm.hi.x && p.y >= prm.lo.y &&
           p.y <= prm.hi.y;
  };

  parallel_for(std::size_t(g.ny), [&](std::size_t jj) {
    int j = int(jj);
    for (int i = 0; i < g.nx; ++i) {
      Point2 z = g.cell_center(i, j);
      if (P.contains(z)) continue;
      for (int k = 0; k <= prm.max_depth; ++k) {
        if (distance_to_rays(z, rays) < eps) {
          g.at(i, j) = int16_t(k);
          break;
        }
        if (k == prm.max_depth) break;
        try {
          z = step(P, z).y;
        } catch (const error&) {
          break;
        }
        if (!in_window(z)) break;
      }
    }
  });
  return g;
}

// ---------------------------------------------------------------------------
// box-counting dimension

struct BoxDimension {
  double slope = 0.0;
  double r2 = 0.0;
  std::vector<std::pair<double, std::size_t>> counts;  // (box size in cells, N)
};

inline BoxDimension box_dimension(const RasterGrid& g,
                                  std::size_t min_marked = 1000) {
  if (g.marked_count() < min_marked)
    fail(errc::too_sparse, "not enough marked cells for box counting");
  BoxDimension out;
  int smax = std::min(g.nx, g.ny) / 8;
  std::vector<double> xs, ys;
  for (int s = 1; s <= smax; s *= 2) {
    std::size_t count = 0;
    for (int bj = 0; bj * s < g.ny; ++bj) {
      for (int bi = 0; bi * s < g.nx; ++bi) {
        bool occ = false;
        for (int j = bj * s; j < std::min((bj + 1) * s, g.ny) && !occ; ++j)
          for (int i = bi * s; i < std::min((bi + 1) * s, g.nx) && !occ; ++i)
            occ = g.marked(i, j);
        count += occ;
      }
    }
    out.counts.push_back({double(s), count});
    xs.push_back(std::log(1.0 / double(s)));
    ys.push_back(std::log(double(std::max<std::size_t>(count, 1))));
  }
  if (out.counts.size() < 5)
    fail(errc::too_sparse, "need at least 5 dyadic scales");
  double n = double(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i]; sy += ys[i];
    sxx += xs[i] * xs[i]; sxy += xs[i] * ys[i]; syy += ys[i] * ys[i];
  }
  double denom = n * sxx - sx * sx;
  out.slope = (n * sxy - sx * sy) / denom;
  double corr = (n * sxy - sx * sy) /
                std::sqrt(std::max(1e-300, (n * sxx - sx * sx) * (n * syy - sy * sy)));
  out.r2 = corr * corr;
  return out;
}

// Rasterize a point set onto a fresh grid (depth 0 where hit).
inline RasterGrid rasterize_points(const std::vector<Point2>& pts, Point2 lo,
                                   Point2 hi, int nx, int ny) {
  RasterGrid g;
  g.lo = lo; g.hi = hi; g.nx = nx; g.ny = ny;
  g.depth.assign(std::size_t(nx) * ny, RasterGrid::kUnmarked);
  for (auto& p : pts) {
    int i, j;
    if (g.cell_of(p, i, j)) g.at(i, j) = 0;
  }
  return g;
}

// ---------------------------------------------------------------------------
// dense-orbit comparison

struct OrbitClosureOverlap {
  double orbit_in_singularity = 0.0;
  double singularity_in_orbit = 0.0;
  double min_overlap = 0.0;
};

inline OrbitClosureOverlap orbit_closure_compare(const ConvexPolygon& P,
                                                 Point2 x0,
                                                 std::size_t iterations,
                                                 const RasterParams& prm) {
  RasterGrid sing = raster(P, prm);
  RasterGrid orb;
  orb.lo = prm.lo; orb.hi = prm.hi; orb.nx = prm.nx; orb.ny = prm.ny;
  orb.depth.assign(std::size_t(prm.nx) * prm.ny, RasterGrid::kUnmarked);

  double stop_radius = 8.0 * std::max(norm(prm.lo), norm(prm.hi));
  Point2 z = x0;
  for (std::size_t k = 0; k < iterations; ++k) {
    int i, j;
    if (orb.cell_of(z, i, j)) orb.at(i, j) = 0;
    try {
      z = step(P, z).y;
    } catch (const error&) {
      break;
    }
    if (norm(z) > stop_radius) break;
  }

  std::size_t both = 0, o = 0, s = 0;
  for (std::size_t idx = 0; idx < sing.depth.size(); ++idx) {
    bool bo = orb.depth[idx] >= 0, bs = sing.depth[idx] >= 0;
    o += bo; s += bs; both += (bo && bs);
  }
  OrbitClosureOverlap r;
  r.orbit_in_singularity = o ? double(both) / double(o) : 0.0;
  r.singularity_in_orbit = s ? double(both) / double(s) : 0.0;
  r.min_overlap = std::min(r.orbit_in_singularity, r.singularity_in_orbit);
  return r;
}

// ---------------------------------------------------------------------------
// exporters

inline void write_pgm(const RasterGrid& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(errc::invalid_argument, "cannot open " + path);
  out << "P5\n" << g.nx << " " << g.ny << "\n255\n";
  int maxd = 1;
  for (auto d : g.depth) maxd = std::max(maxd, int(d));
  std::vector<unsigned char> row(g.nx);
  for (int j = g.ny - 1; j >= 0; --j) {  // image rows top-down
    for (int i = 0; i < g.nx; ++i) {
      int16_t d = g.at(i, j);
      row[i] = d < 0 ? 255 : (unsigned char)(30 + (200 * int(d)) / maxd);
    }
    out.write(reinterpret_cast<const char*>(row.data()), row.size());
  }
}

inline void write_ppm(const RasterGrid& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(errc::invalid_argument, "cannot open " + path);
  out << "P6\n" << g.nx << " " << g.ny << "\n255\n";
  int maxd = 1;
  for (auto d : g.depth) maxd = std::max(maxd, int(d));
  std::vector<unsigned char> row(std::size_t(g.nx) * 3);
  for (int j = g.ny - 1; j >= 0; --j) {
    for (int i = 0; i < g.nx; ++i) {
      int16_t d = g.at(i, j);
      unsigned char* px = &row[std::size_t(i) * 3];
      if (d < 0) { px[0] = px[1] = px[2] = 255; continue; }
      double t = double(d) / maxd;  // 0 newest rays, 1 deepest preimages
      px[0] = (unsigned char)(40 + 180 * t);
      px[1] = (unsigned char)(60 + 60 * (1.0 - t));
      px[2] = (unsigned char)(200 - 170 * t);
    }
    out.write(reinterpret_cast<const char*>(row.data()), row.size());
  }
}

inline void write_raster_csv(const RasterGrid& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(errc::invalid_argument, "cannot open " + path);
  out << "i,j,depth\n";
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (g.marked(i, j)) out << i << "," << j << "," << g.at(i, j) << "\n";
}

}  // namespace olb
