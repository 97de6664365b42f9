#pragma once

// Builtin billiard tables and the vertex-file loader.

#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "olb/geom.hpp"

namespace olb {

inline ConvexPolygon make_square() {
  return ConvexPolygon({{1, 1}, {-1, 1}, {-1, -1}, {1, -1}});
}

inline ConvexPolygon make_segment(double half_length = 1.0) {
  return ConvexPolygon({{-half_length, 0}, {half_length, 0}});
}

inline ConvexPolygon make_regular(int n, double circumradius = 1.0,
                                  double phase = M_PI / 2.0) {
  if (n < 3) fail(errc::invalid_argument, "regular table needs n >= 3");
  std::vector<Point2> v;
  v.reserve(n);
  for (int k = 0; k < n; ++k) {
    double t = phase + 2.0 * M_PI * k / n;
    v.push_back({circumradius * std::cos(t), circumradius * std::sin(t)});
  }
  return ConvexPolygon(std::move(v));
}

// Kite quadrilateral (-1,0), (0,-1), (a,0), (0,1); irrational a makes the
// classic escaping table of the outer area billiard.
inline ConvexPolygon make_kite(double a) {
  if (!(a > 0.0)) fail(errc::invalid_argument, "kite parameter must be positive");
  return ConvexPolygon({{-1, 0}, {0, -1}, {a, 0}, {0, 1}});
}

// Random strictly convex n-gon: sorted angles on the unit circle with a
// minimum angular gap, deterministic in the seed.
inline ConvexPolygon make_random(int n, std::uint64_t seed) {
  if (n < 3) fail(errc::invalid_argument, "random table needs n >= 3");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 2.0 * M_PI);
  const double min_gap = 0.25 * (2.0 * M_PI / n);
  std::vector<double> angles(n);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    for (auto& a : angles) a = uni(rng);
    std::sort(angles.begin(), angles.end());
    bool ok = true;
    for (int i = 0; i < n; ++i) {
      double gap = (i + 1 < n) ? angles[i + 1] - angles[i]
                               : angles[0] + 2.0 * M_PI - angles[n - 1];
      if (gap < min_gap) { ok = false; break; }
    }
    if (ok) break;
  }
  std::vector<Point2> v;
  v.reserve(n);
  for (double a : angles) v.push_back({std::cos(a), std::sin(a)});
  return ConvexPolygon(std::move(v));
}

inline ConvexPolygon scaled_to_diameter(const ConvexPolygon& P, double target) {
  return P.scaled(target / P.diameter());
}

// Vertex file: JSON document with a CCW "vertices" array of [x, y] pairs.
inline ConvexPolygon load_table_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::invalid_argument, "cannot open table file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    fail(errc::invalid_argument, std::string("table file parse error: ") + e.what());
  }
  if (!j.contains("vertices") || !j["vertices"].is_array())
    fail(errc::invalid_argument, "table file needs a 'vertices' array");
  std::vector<Point2> v;
  for (auto& p : j["vertices"]) {
    if (!p.is_array() || p.size() != 2)
      fail(errc::invalid_argument, "vertices entries must be [x, y]");
    v.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return ConvexPolygon(std::move(v));
}

// Spec strings: square | segment | regular:n | kite:a | random:n:seed | a path.
inline ConvexPolygon make_table(const std::string& spec) {
  auto split = [](const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    return parts;
  };
  auto parts = split(spec);
  const std::string& head = parts[0];
  try {
    if (head == "square") return make_square();
    if (head == "segment")
      return make_segment(parts.size() > 1 ? std::stod(parts[1]) : 1.0);
    if (head == "regular") {
      if (parts.size() < 2) fail(errc::invalid_argument, "regular:n");
      return make_regular(std::stoi(parts[1]),
                          parts.size() > 2 ? std::stod(parts[2]) : 1.0);
    }
    if (head == "kite")
      return make_kite(parts.size() > 1 ? std::stod(parts[1])
                                        : 0.6180339887498949);
    if (head == "random") {
      if (parts.size() < 3) fail(errc::invalid_argument, "random:n:seed");
      return make_random(std::stoi(parts[1]), std::stoull(parts[2]));
    }
  } catch (const std::invalid_argument&) {
    fail(errc::invalid_argument, "bad table parameter in '" + spec + "'");
  }
  return load_table_file(spec);
}

}  // namespace olb
