#pragma once

// The square table's 16-piece decomposition, symbolic piece words, the
// guarded word application, and the escape-constant experiment.
//
// Pieces T_ijk: the step whose lines l1, l2, l3 pass through vertices
// v_i, v_j, v_k (v_q = square vertex in quadrant q).  Consecutive labels
// chain as (i', j') = (j, k), which pins every word below.

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "olb/billiard.hpp"
#include "olb/parallel.hpp"
#include "olb/tables.hpp"

namespace olb {

struct PieceLabel {
  int i = 0, j = 0, k = 0;  // 1..4

  bool operator==(const PieceLabel& o) const {
    return i == o.i && j == o.j && k == o.k;
  }
  bool operator!=(const PieceLabel& o) const { return !(*this == o); }
  bool operator<(const PieceLabel& o) const {
    return std::tie(i, j, k) < std::tie(o.i, o.j, o.k);
  }
  std::string str() const {
    return std::to_string(i) + std::to_string(j) + std::to_string(k);
  }
};

// Word in composition order: the last element is applied first.
using PieceWord = std::vector<PieceLabel>;

// The 16 admissible labels: {123, 124, 131, 134} and cyclic shifts mod 4.
inline std::vector<PieceLabel> admissible_labels() {
  std::vector<PieceLabel> out;
  auto shift = [](int v, int by) { return 1 + ((v - 1 + by) % 4); };
  for (PieceLabel base : {PieceLabel{1, 2, 3}, PieceLabel{1, 2, 4},
                          PieceLabel{1, 3, 1}, PieceLabel{1, 3, 4}})
    for (int s = 0; s < 4; ++s)
      out.push_back({shift(base.i, s), shift(base.j, s), shift(base.k, s)});
  std::sort(out.begin(), out.end());
  return out;
}

inline PieceLabel label_of(const StepRecord& rec) {
  return {int(rec.piece_i()) + 1, int(rec.piece_j()) + 1,
          int(rec.piece_k()) + 1};
}

// Reads off which square vertex each support line passes through.
inline PieceLabel classify(const ConvexPolygon& square, Point2 x) {
  return label_of(step(square, x));
}

// ---------------------------------------------------------------------------
// symbolic words

enum class EscapeSymbol { E1, E2, E3, E4, A1, A2, A4, B1, B2, B3, Tn };

inline EscapeSymbol parse_symbol(const std::string& s) {
  if (s == "E1") return EscapeSymbol::E1;
  if (s == "E2") return EscapeSymbol::E2;
  if (s == "E3") return EscapeSymbol::E3;
  if (s == "E4") return EscapeSymbol::E4;
  if (s == "A1") return EscapeSymbol::A1;
  if (s == "A2") return EscapeSymbol::A2;
  if (s == "A4") return EscapeSymbol::A4;
  if (s == "B1") return EscapeSymbol::B1;
  if (s == "B2") return EscapeSymbol::B2;
  if (s == "B3") return EscapeSymbol::B3;
  if (s == "Tn") return EscapeSymbol::Tn;
  fail(errc::unknown_symbol, "unknown escape symbol " + s);
}

namespace detail {

inline void append(PieceWord& w, const PieceWord& tail) {
  w.insert(w.end(), tail.begin(), tail.end());
}

inline void append_pairs(PieceWord& w, PieceLabel a, PieceLabel b, int times) {
  for (int t = 0; t < times; ++t) {
    w.push_back(a);
    w.push_back(b);
  }
}

}  // namespace detail

inline constexpr PieceLabel kE1{3, 1, 3}, kE2{4, 2, 4}, kE3{1, 3, 1},
    kE4{2, 4, 2};

// Words in composition order (rightmost applied first).  The elliptic phase
// of A4 runs on the v2-v4 diagonal (E4/E2): the label chain rule and the
// quadrant-shift symmetry with A1/A2 both force this.
inline PieceWord word_for(EscapeSymbol sym, int n = 0) {
  if (n < 0) fail(errc::invalid_argument, "word exponent must be >= 0");
  PieceWord w;
  switch (sym) {
    case EscapeSymbol::E1: return {kE1};
    case EscapeSymbol::E2: return {kE2};
    case EscapeSymbol::E3: return {kE3};
    case EscapeSymbol::E4: return {kE4};
    case EscapeSymbol::A1:
      w.push_back({1, 3, 4});
      detail::append_pairs(w, kE1, kE3, n);
      w.push_back(kE1);
      w.push_back({2, 3, 1});
      return w;
    case EscapeSymbol::A2:
      w.push_back({2, 4, 1});
      detail::append_pairs(w, kE2, kE4, n);
      w.push_back(kE2);
      w.push_back({3, 4, 2});
      return w;
    case EscapeSymbol::A4:
      w.push_back({4, 2, 3});
      detail::append_pairs(w, kE4, kE2, n);
      w.push_back(kE4);
      w.push_back({1, 2, 4});
      return w;
    case EscapeSymbol::B1:
      w.push_back({3, 1, 2});
      detail::append_pairs(w, kE3, kE1, n + 1);
      w.push_back({2, 3, 1});
      return w;
    case EscapeSymbol::B2:
      w.push_back({4, 2, 3});
      detail::append_pairs(w, kE4, kE2, n + 1);
      w.push_back({3, 4, 2});
      return w;
    case EscapeSymbol::B3:
      w.push_back({1, 3, 4});
      detail::append_pairs(w, kE1, kE3, n + 1);
      w.push_back({4, 1, 3});
      return w;
    case EscapeSymbol::Tn:
      detail::append(w, word_for(EscapeSymbol::B1, n));
      detail::append(w, word_for(EscapeSymbol::B2, n));
      detail::append(w, word_for(EscapeSymbol::B3, n));
      detail::append(w, word_for(EscapeSymbol::A2, n));
      detail::append(w, word_for(EscapeSymbol::A1, n));
      detail::append(w, word_for(EscapeSymbol::A4, n));
      return w;
  }
  fail(errc::unknown_symbol, "unhandled escape symbol");
}

// The same six blocks grouped from the east-band marker: entry piece 413,
// i.e. W_n = A2_n . A1_n . A4_n . B1_n . B2_n . B3_n.  This is the rotation
// of the composite whose fixed-height marching line is horizontal.
inline PieceWord marching_cycle_word(int n) {
  PieceWord w;
  detail::append(w, word_for(EscapeSymbol::A2, n));
  detail::append(w, word_for(EscapeSymbol::A1, n));
  detail::append(w, word_for(EscapeSymbol::A4, n));
  detail::append(w, word_for(EscapeSymbol::B1, n));
  detail::append(w, word_for(EscapeSymbol::B2, n));
  detail::append(w, word_for(EscapeSymbol::B3, n));
  return w;
}

// ---------------------------------------------------------------------------
// guarded application

class label_mismatch_error : public error {
 public:
  label_mismatch_error(std::size_t index, PieceLabel observed,
                       PieceLabel expected)
      : error(errc::label_mismatch,
              "step " + std::to_string(index) + ": observed " + observed.str() +
                  ", expected " + expected.str()),
        step_index(index),
        observed(observed),
        expected(expected) {}

  std::size_t step_index;
  PieceLabel observed;
  PieceLabel expected;
};

// Applies the word right-to-left, checking the observed label of every
// sub-step against the expected one.
inline Point2 apply_word(const ConvexPolygon& square, Point2 x,
                         const PieceWord& w) {
  if (w.empty()) fail(errc::invalid_argument, "empty piece word");
  std::size_t taken = 0;
  for (auto it = w.rbegin(); it != w.rend(); ++it, ++taken) {
    StepRecord rec = step(square, x);
    PieceLabel obs = label_of(rec);
    if (obs != *it) throw label_mismatch_error(taken, obs, *it);
    x = rec.y;
  }
  return x;
}

// ---------------------------------------------------------------------------
// census of observed pieces

struct CensusEntry {
  std::size_t count = 0;
  double max_radius = 0.0;
};

inline std::map<PieceLabel, CensusEntry> escape_census(
    const ConvexPolygon& square, std::size_t samples, double half_width = 30.0,
    std::uint64_t seed = 20240817) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-half_width, half_width);
  std::map<PieceLabel, CensusEntry> census;
  std::size_t done = 0;
  while (done < samples) {
    Point2 x{uni(rng), uni(rng)};
    PieceLabel lab;
    try {
      lab = classify(square, x);
    } catch (const error&) {
      continue;  // inside the table or on a singular ray
    }
    auto& e = census[lab];
    ++e.count;
    e.max_radius = std::max(e.max_radius, norm(x));
    ++done;
  }
  return census;
}

// ---------------------------------------------------------------------------
// escape-constant experiment

struct EscapeResidual {
  int n = 0;
  double r = std::numeric_limits<double>::infinity();
  bool label_ok = false;
};

struct EscapeFit {
  double c_m = 0.0, c_x = 0.0, c_y = 0.0;
  std::vector<EscapeResidual> residuals;
  std::size_t mismatches = 0;
  std::string cycle;  // marker grouping that validated
  std::size_t probe_cycles = 0;
};

struct EscapeFitOptions {
  double window_lo = -50.0, window_hi = 50.0;
  int n_min = 10, n_max = 200;
  int probe_heights = 39;
  int probe_radii = 120;
  std::size_t max_parse_cycles = 64;
};

namespace detail {

struct BlockSpec {
  PieceLabel entry, phase_a, phase_b, exit;
  bool odd_phase;  // A-blocks carry an odd elliptic run, B-blocks an even one
};

inline const std::array<BlockSpec, 6>& marching_blocks() {
  static const std::array<BlockSpec, 6> blocks = {{
      {{4, 1, 3}, kE3, kE1, {1, 3, 4}, false},  // B3: 413 (131 313)^{n+1} 134
      {{3, 4, 2}, kE2, kE4, {4, 2, 3}, false},  // B2: 342 (424 242)^{n+1} 423
      {{2, 3, 1}, kE1, kE3, {3, 1, 2}, false},  // B1: 231 (313 131)^{n+1} 312
      {{1, 2, 4}, kE4, kE2, {4, 2, 3}, true},   // A4: 124 242 (424 242)^n 423
      {{2, 3, 1}, kE1, kE3, {1, 3, 4}, true},   // A1: 231 313 (131 313)^n 134
      {{3, 4, 2}, kE2, kE4, {2, 4, 1}, true},   // A2: 342 424 (242 424)^n 241
  }};
  return blocks;
}

// Parse one block from `labels` starting at pos: entry, an alternating
// elliptic run, then the exit label.  Returns the block exponent n.
inline std::optional<int> parse_block(const std::vector<PieceLabel>& labels,
                                      std::size_t& pos, const BlockSpec& b) {
  if (pos >= labels.size() || labels[pos] != b.entry) return std::nullopt;
  ++pos;
  std::size_t run = 0;
  while (pos < labels.size() && labels[pos] != b.exit) {
    PieceLabel want = (run % 2 == 0) ? b.phase_a : b.phase_b;
    if (labels[pos] != want) return std::nullopt;
    ++run;
    ++pos;
  }
  if (pos >= labels.size()) return std::nullopt;
  ++pos;  // consume exit
  if (b.odd_phase) {
    if (run % 2 == 0 || run < 1) return std::nullopt;
    return int((run - 1) / 2);
  }
  if (run % 2 != 0 || run < 2) return std::nullopt;
  return int(run / 2 - 1);
}

struct ParsedCycle {
  int n = -1;           // consensus exponent (B-blocks n, A-blocks n)
  Point2 marker;        // point at the cycle's 413 entry
  std::size_t start_index = 0;
};

// Parse the label stream of a raw orbit into marching cycles.
inline std::vector<ParsedCycle> parse_cycles(
    const std::vector<PieceLabel>& labels, const std::vector<Point2>& points,
    std::size_t max_cycles) {
  std::vector<ParsedCycle> out;
  std::size_t pos = 0;
  while (out.size() < max_cycles) {
    ParsedCycle c;
    c.start_index = pos;
    c.marker = pos < points.size() ? points[pos] : Point2{};
    int exps[6];
    std::size_t p = pos;
    bool ok = true;
    for (int bi = 0; bi < 6; ++bi) {
      auto e = parse_block(labels, p, marching_blocks()[bi]);
      if (!e) { ok = false; break; }
      exps[bi] = *e;
    }
    if (!ok) break;
    // all six blocks of one cycle share the exponent
    if (!(exps[0] == exps[1] && exps[1] == exps[2] && exps[2] == exps[3] &&
          exps[3] == exps[4] && exps[4] == exps[5]))
      break;
    c.n = exps[0];
    out.push_back(c);
    pos = p;
  }
  return out;
}

}  // namespace detail

// Orbit probe: raw labels and points from x.
inline void probe_orbit(const ConvexPolygon& square, Point2 x,
                        std::size_t max_steps, std::vector<PieceLabel>& labels,
                        std::vector<Point2>& points) {
  labels.clear();
  points.clear();
  for (std::size_t k = 0; k < max_steps; ++k) {
    StepRecord rec;
    try {
      rec = step(square, x);
    } catch (const error&) {
      return;
    }
    points.push_back(x);
    labels.push_back(label_of(rec));
    x = rec.y;
  }
}

// Searches for marching constants: probes the east band for orbits whose
// label streams parse into marching cycles with unit exponent increments,
// fits (C_m, C_x, C_y) to the cycle markers, then evaluates the guarded
// residuals r(n) = |W_n(C_x + n C_m, C_y) - (C_x + (n+1) C_m, C_y)| over the
// requested range.
inline EscapeFit fit_constants(const ConvexPolygon& square,
                               const EscapeFitOptions& opt = {}) {
  // ---- stage 1: probe and parse
  struct Markers {
    std::vector<std::pair<int, Point2>> pts;
  };
  Markers best;

  std::vector<double> heights, radii;
  for (int i = 0; i < opt.probe_heights; ++i)
    heights.push_back(-0.95 + 1.9 * i / (opt.probe_heights - 1));
  double rlo = std::max(3.0, opt.window_lo < 3.0 ? 3.0 : opt.window_lo);
  for (int i = 0; i < opt.probe_radii; ++i)
    radii.push_back(rlo + (opt.window_hi - rlo) * i / (opt.probe_radii - 1));

  std::vector<Markers> results(heights.size() * radii.size());
  parallel_for(results.size(), [&](std::size_t idx) {
    double y0 = heights[idx / radii.size()];
    double x0 = radii[idx % radii.size()];
    Point2 seed{x0, y0};
    PieceLabel first;
    try {
      first = classify(square, seed);
    } catch (const error&) {
      return;
    }
    if (first != PieceLabel{4, 1, 3}) return;
    std::vector<PieceLabel> labels;
    std::vector<Point2> points;
    // enough steps for several cycles at this radius
    std::size_t budget = std::size_t(600 + 90.0 * x0);
    probe_orbit(square, seed, budget, labels, points);
    auto cycles = detail::parse_cycles(labels, points, opt.max_parse_cycles);
    // keep only runs whose exponents increment by one
    std::size_t run = 0;
    for (std::size_t i = 0; i < cycles.size(); ++i) {
      if (i > 0 && cycles[i].n != cycles[i - 1].n + 1) break;
      ++run;
    }
    Markers m;
    for (std::size_t i = 0; i < run; ++i)
      m.pts.push_back({cycles[i].n, cycles[i].marker});
    results[idx] = std::move(m);
  });
  for (auto& m : results)
    if (m.pts.size() > best.pts.size()) best = m;

  if (best.pts.size() < 2)
    fail(errc::no_candidate, "no marching orbit found in the search window");

  // ---- stage 2: least-squares line through the markers
  auto fit_line = [](const std::vector<std::pair<int, Point2>>& pts) {
    double n = double(pts.size());
    double sn = 0, sx = 0, snn = 0, snx = 0, sy = 0;
    for (auto& [k, p] : pts) {
      sn += k; sx += p.x; snn += double(k) * k; snx += double(k) * p.x;
      sy += p.y;
    }
    double cm = (n * snx - sn * sx) / (n * snn - sn * sn);
    double cx = (sx - cm * sn) / n;
    double cy = sy / n;
    return std::array<double, 3>{cm, cx, cy};
  };
  auto line = fit_line(best.pts);

  EscapeFit fit;
  fit.c_m = line[0];
  fit.c_x = line[1];
  fit.c_y = line[2];
  fit.probe_cycles = best.pts.size();
  fit.cycle = "marching (entry 413)";

  // ---- stage 3: guarded residual table over the full range
  auto evaluate = [&](double cm, double cx, double cy,
                      std::vector<EscapeResidual>& table) {
    table.assign(std::size_t(opt.n_max - opt.n_min + 1), {});
    parallel_for(table.size(), [&](std::size_t t) {
      int n = opt.n_min + int(t);
      EscapeResidual res;
      res.n = n;
      Point2 seed{cx + n * cm, cy};
      Point2 target{cx + (n + 1) * cm, cy};
      try {
        Point2 img = apply_word(square, seed, marching_cycle_word(n));
        res.r = dist(img, target);
        res.label_ok = true;
      } catch (const error&) {
        res.label_ok = false;
      }
      table[t] = res;
    });
    std::size_t bad = 0;
    double sum2 = 0.0;
    for (auto& r : table) {
      if (!r.label_ok) ++bad;
      else sum2 += r.r * r.r;
    }
    return std::make_pair(bad, sum2);
  };

  evaluate(fit.c_m, fit.c_x, fit.c_y, fit.residuals);
  fit.mismatches = 0;
  for (auto& r : fit.residuals)
    if (!r.label_ok) ++fit.mismatches;

  // ---- stage 4: local refinement (Nelder-Mead on a subsampled objective)
  {
    std::vector<int> probe_ns;
    for (int n = opt.n_min; n <= opt.n_max; n += std::max(1, (opt.n_max - opt.n_min) / 12))
      probe_ns.push_back(n);
    auto objective = [&](const std::array<double, 3>& c) {
      double total = 0.0;
      for (int n : probe_ns) {
        Point2 seed{c[1] + n * c[0], c[2]};
        Point2 target{c[1] + (n + 1) * c[0], c[2]};
        try {
          Point2 img = apply_word(square, seed, marching_cycle_word(n));
          double r = dist(img, target);
          total += r * r;
        } catch (const error&) {
          total += 1e6;
        }
      }
      return total;
    };
    std::array<std::array<double, 3>, 4> simplex;
    simplex[0] = {fit.c_m, fit.c_x, fit.c_y};
    simplex[1] = {fit.c_m * (1 + 1e-3), fit.c_x, fit.c_y};
    simplex[2] = {fit.c_m, fit.c_x + 0.02, fit.c_y};
    simplex[3] = {fit.c_m, fit.c_x, fit.c_y + 0.02};
    std::array<double, 4> fv;
    for (int i = 0; i < 4; ++i) fv[i] = objective(simplex[i]);
    for (int iter = 0; iter < 120; ++iter) {
      // order
      for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b)
          if (fv[b] < fv[a]) { std::swap(fv[a], fv[b]); std::swap(simplex[a], simplex[b]); }
      std::array<double, 3> centroid{0, 0, 0};
      for (int a = 0; a < 3; ++a)
        for (int d = 0; d < 3; ++d) centroid[d] += simplex[a][d] / 3.0;
      auto mix = [&](double w) {
        std::array<double, 3> p;
        for (int d = 0; d < 3; ++d)
          p[d] = centroid[d] + w * (simplex[3][d] - centroid[d]);
        return p;
      };
      auto refl = mix(-1.0);
      double fr = objective(refl);
      if (fr < fv[0]) {
        auto exp_ = mix(-2.0);
        double fe = objective(exp_);
        if (fe < fr) { simplex[3] = exp_; fv[3] = fe; }
        else { simplex[3] = refl; fv[3] = fr; }
      } else if (fr < fv[2]) {
        simplex[3] = refl; fv[3] = fr;
      } else {
        auto con = mix(0.5);
        double fc = objective(con);
        if (fc < fv[3]) { simplex[3] = con; fv[3] = fc; }
        else {
          for (int a = 1; a < 4; ++a) {
            for (int d = 0; d < 3; ++d)
              simplex[a][d] = 0.5 * (simplex[a][d] + simplex[0][d]);
            fv[a] = objective(simplex[a]);
          }
        }
      }
    }
    int bi = 0;
    for (int a = 1; a < 4; ++a)
      if (fv[a] < fv[bi]) bi = a;
    std::vector<EscapeResidual> refined;
    auto [bad, sum2] = evaluate(simplex[bi][0], simplex[bi][1], simplex[bi][2], refined);
    std::size_t bad0 = fit.mismatches;
    double sum0 = 0.0;
    for (auto& r : fit.residuals)
      if (r.label_ok) sum0 += r.r * r.r;
    if (bad < bad0 || (bad == bad0 && sum2 < sum0)) {
      fit.c_m = simplex[bi][0];
      fit.c_x = simplex[bi][1];
      fit.c_y = simplex[bi][2];
      fit.residuals = std::move(refined);
      fit.mismatches = bad;
    }
  }

  if (fit.mismatches == fit.residuals.size())
    fail(errc::no_candidate, "no label-consistent constants in the window");
  return fit;
}

}  // namespace olb
