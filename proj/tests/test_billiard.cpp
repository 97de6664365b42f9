#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "olb/billiard.hpp"
#include "olb/tables.hpp"

using namespace olb;

namespace {

// Independent ellipse-chord oracle: the second intersection of the ray from
// x through focus f with the confocal ellipse through x, found by bisection
// on the focal-sum defect (no shared code with the map construction).
Point2 oracle_focal_chord(Point2 f1, Point2 f2, Point2 x, Point2 through_focus) {
  double fs = dist(x, f1) + dist(x, f2);
  Vec2 dir = normalized(through_focus - x);
  auto defect = [&](double t) {
    Point2 q = x + t * dir;
    return dist(q, f1) + dist(q, f2) - fs;
  };
  double lo = dist(x, through_focus);       // inside the ellipse
  double hi = lo + 2.0 * fs;                // certainly outside
  REQUIRE(defect(lo) < 0.0);
  REQUIRE(defect(hi) > 0.0);
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (defect(mid) < 0.0 ? lo : hi) = mid;
  }
  return x + 0.5 * (lo + hi) * dir;
}

Point2 rand_exterior(std::mt19937_64& rng, const ConvexPolygon& P, double rlo,
                     double rhi) {
  std::uniform_real_distribution<double> rad(rlo, rhi), ang(0, 2 * M_PI);
  for (;;) {
    double a = ang(rng);
    Point2 x = rad(rng) * Point2{std::cos(a), std::sin(a)};
    if (P.contains(x)) continue;
    try {
      support_contacts(P, x);
      return x;
    } catch (const error&) {
      continue;
    }
  }
}

}  // namespace

TEST_CASE("2-gon step matches the focal-chord oracle") {
  auto seg = make_segment();
  Point2 x{0, 2};
  StepRecord rec = step(seg, x);

  // tangency at the right contact (-1, 0)
  CHECK(rec.tangency.x == Catch::Approx(-1.0));
  CHECK(rec.tangency.y == Catch::Approx(0.0).margin(1e-15));

  Point2 expect = oracle_focal_chord({-1, 0}, {1, 0}, x, rec.tangency);
  CHECK(rec.y.x == Catch::Approx(expect.x).margin(1e-10));
  CHECK(rec.y.y == Catch::Approx(expect.y).margin(1e-10));
  // closed form of that oracle value
  CHECK(rec.y.x == Catch::Approx(-5.0 / 3.0));
  CHECK(rec.y.y == Catch::Approx(-4.0 / 3.0));

  // focal sum is conserved
  CHECK(focal_sum_at({-1, 0}, {1, 0}, rec.y) ==
        Catch::Approx(2.0 * std::sqrt(5.0)));

  // the 2-gon is steady and its virtual table is the table
  CHECK(rec.steady);
  CHECK(dist(rec.virtual_table[0], {1, 0}) < 1e-12);
  CHECK(dist(rec.virtual_table[1], {-1, 0}) < 1e-12);
}

TEST_CASE("2-gon singular on the table line") {
  auto seg = make_segment();
  CHECK_THROWS_MATCHES(step(seg, {2, 0}), error,
                       Catch::Matchers::Predicate<error>([](const error& e) {
                         return e.code() == errc::singular;
                       }));
  CHECK_THROWS_AS(step(seg, {-1.5, 0}), error);
}

TEST_CASE("segment_step closed form") {
  Point2 f1{-1, 0}, f2{1, 0};
  Point2 y = segment_step(f1, f2, {0, 2});
  CHECK(y.x == Catch::Approx(-5.0 / 3.0));
  CHECK(y.y == Catch::Approx(-4.0 / 3.0));

  // central symmetry of the configuration
  Point2 y2 = segment_step(f1, f2, {0, -2});
  CHECK(y2.x == Catch::Approx(5.0 / 3.0));
  CHECK(y2.y == Catch::Approx(4.0 / 3.0));

  CHECK_THROWS_MATCHES(segment_step(f1, f2, {3, 0}), error,
                       Catch::Matchers::Predicate<error>([](const error& e) {
                         return e.code() == errc::collinear;
                       }));

  // agrees with the polygon path on a 2-vertex table
  auto seg = make_segment();
  std::mt19937_64 rng(5);
  for (int t = 0; t < 300; ++t) {
    Point2 x = rand_exterior(rng, seg, 0.2, 20.0);
    Point2 a;
    try {
      a = step(seg, x).y;
    } catch (const error&) {
      continue;
    }
    Point2 b = segment_step(f1, f2, x);
    CHECK(dist(a, b) <= 1e-9 * 2.0 * std::max(1.0, norm(a)));
  }
}

TEST_CASE("square step at large radius obeys the uniform bound") {
  auto sq = make_square();
  double d = sq.diameter();
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> ang(0, 2 * M_PI);
  int done = 0;
  while (done < 200) {
    double a = ang(rng);
    Point2 x = (20.0 * d) * Point2{std::cos(a), std::sin(a)};
    StepRecord rec;
    try {
      rec = step(sq, x);
    } catch (const error&) {
      continue;
    }
    ++done;
    double lhs = std::abs(dist(x, rec.tangency) - dist(rec.tangency, rec.y));
    CHECK(lhs <= 1.5 * d);
  }
}

TEST_CASE("squared map drifts clockwise at large radius") {
  for (auto& P : {make_square(), make_regular(5), make_random(6, 99)}) {
    double d = P.diameter();
    for (int k = 0; k < 8; ++k) {
      double theta = 2 * M_PI * k / 8 + 0.0137;
      Point2 x = (50.0 * d) * Point2{std::cos(theta), std::sin(theta)};
      Point2 y2 = step(P, step(P, x).y).y;
      double drift = std::remainder(polar_angle(y2) - theta, 2 * M_PI);
      CHECK(drift < 0.0);
      CHECK(drift > -0.5);
    }
  }
}

TEST_CASE("step invariants along orbits") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    auto P = make_random(5, 1000 + trial);
    double d = P.diameter();
    Point2 x0 = rand_exterior(rng, P, 2.0, 30.0);
    Orbit o = orbit(P, x0, 60, 1e6);
    for (std::size_t i = 0; i + 1 < o.samples.size(); ++i) {
      const auto& r = o.samples[i].record;
      REQUIRE(r.has_value());
      // x = l1 cap l2 and y = l2 cap l3
      CHECK(std::abs(r->l1.signed_dist(r->x)) <= 1e-7 * std::max(d, norm(r->x)));
      CHECK(std::abs(r->l2.signed_dist(r->x)) <= 1e-7 * std::max(d, norm(r->x)));
      CHECK(std::abs(r->l2.signed_dist(r->y)) <= 1e-7 * std::max(d, norm(r->y)));
      CHECK(std::abs(r->l3.signed_dist(r->y)) <= 1e-7 * std::max(d, norm(r->y)));
      // circle tangent to all three lines
      for (const DirectedLine* L : {&r->l1, &r->l2, &r->l3})
        CHECK(std::abs(std::abs(L->signed_dist(r->circle.center)) -
                       r->circle.radius) <= 1e-8 * r->circle.radius);
      // tangency strictly between x and y on l2
      double tx = r->l2.project(r->x), tp = r->l2.project(r->tangency),
             ty = r->l2.project(r->y);
      CHECK(tx < tp);
      CHECK(tp < ty);
      CHECK(r->steady == (r->third_vertex == r->left_vertex));
      if (o.samples[i + 1].record) {
        const auto& rn = o.samples[i + 1].record;
        CHECK(rn->left_vertex == r->right_vertex);   // r_i = l_{i+1}
        CHECK(rn->right_vertex == r->third_vertex);  // r_{i+1} = contact of l3
        CHECK(r->steady == (r->left_vertex == rn->right_vertex));
      }
    }
  }
}

TEST_CASE("virtual table equivalence") {
  std::mt19937_64 rng(41);
  int steady_seen = 0, unsteady_seen = 0;
  for (int trial = 0; trial < 400; ++trial) {
    auto P = make_random(5, 2000 + trial);
    double d = P.diameter();
    Point2 x = rand_exterior(rng, P, 1.5, 25.0);
    StepRecord rec;
    try {
      rec = step(P, x);
    } catch (const error&) {
      continue;
    }
    ConvexPolygon vt({rec.virtual_table[0], rec.virtual_table[1]});
    StepRecord rec2;
    try {
      rec2 = step(vt, x);
    } catch (const error&) {
      continue;
    }
    (rec.steady ? steady_seen : unsteady_seen)++;
    CHECK(dist(rec.circle.center, rec2.circle.center) <= 1e-8 * std::max(d, rec.circle.radius));
    CHECK(std::abs(rec.circle.radius - rec2.circle.radius) <= 1e-8 * std::max(d, rec.circle.radius));
    CHECK(dist(rec.y, rec2.y) <= 1e-8 * std::max(d, norm(rec.y)));
  }
  CHECK(steady_seen > 20);
  CHECK(unsteady_seen > 20);
}

TEST_CASE("inverse undoes the step") {
  std::mt19937_64 rng(53);
  double worst = 0.0;
  int done = 0;
  while (done < 1000) {
    auto P = make_random(5, 3000 + done);
    double d = P.diameter();
    Point2 x = rand_exterior(rng, P, 1.5, 30.0);
    StepRecord fwd;
    StepRecord back;
    try {
      fwd = step(P, x);
      back = step_inverse(P, fwd.y);
    } catch (const error&) {
      continue;
    }
    ++done;
    worst = std::max(worst, dist(back.x, x) / d);
    CHECK(dist(back.x, x) <= 1e-8 * d * std::max(1.0, norm(x) / d));
    // same auxiliary circle both ways
    CHECK(dist(back.circle.center, fwd.circle.center) <=
          1e-7 * std::max(d, fwd.circle.radius));
  }
  INFO("worst relative round trip " << worst);

  // the preimage of the 2-gon image
  auto seg = make_segment();
  StepRecord r = step_inverse(seg, {-5.0 / 3.0, -4.0 / 3.0});
  CHECK(r.x.x == Catch::Approx(0.0).margin(1e-10));
  CHECK(r.x.y == Catch::Approx(2.0).margin(1e-10));

  // reverse-singular: counter-clockwise side extension
  auto sq = make_square();
  CHECK_THROWS_MATCHES(step_inverse(sq, {-3, 1}), error,
                       Catch::Matchers::Predicate<error>([](const error& e) {
                         return e.code() == errc::singular;
                       }));
}

TEST_CASE("orbit bookkeeping") {
  auto seg = make_segment();
  SECTION("2-gon conservation over 100 steps") {
    Orbit o = orbit(seg, {0, 2}, 100, 1e9);
    REQUIRE(o.samples.size() == 101);
    CHECK(o.reason == StopReason::completed);
    double fs0 = focal_sum_at({-1, 0}, {1, 0}, o.samples[0].point);
    for (auto& s : o.samples) {
      double fs = focal_sum_at({-1, 0}, {1, 0}, s.point);
      CHECK(std::abs(fs - fs0) <= 1e-9 * fs0);
    }
  }
  SECTION("terminal markers") {
    auto sq = make_square();
    Orbit inside = orbit(sq, {0.2, 0.1}, 10, 1e9);
    CHECK(inside.samples.empty());
    CHECK(inside.reason == StopReason::point_inside);

    Orbit sing = orbit(sq, {3, 1}, 10, 1e9);
    CHECK(sing.reason == StopReason::singular);
    CHECK(sing.samples.size() == 1);
  }
}

TEST_CASE("2-gon orbits attract to the major axis") {
  auto seg = make_segment();
  Orbit o = orbit(seg, {0.3, 1.7}, 40, 1e9);
  REQUIRE(o.reason == StopReason::completed);
  std::vector<double> ys;
  for (std::size_t i = 10; i < o.samples.size(); i += 2)
    ys.push_back(std::abs(o.samples[i].point.y));
  for (std::size_t i = 1; i < ys.size(); ++i) CHECK(ys[i] <= ys[i - 1] + 1e-12);
}

TEST_CASE("outer area step") {
  auto sq = make_square();
  SECTION("reflection through the support vertex") {
    Point2 x{2, 2};
    Point2 y = outer_area_step(sq, x);
    Point2 mid = 0.5 * (x + y);
    bool at_vertex = false;
    for (auto& v : sq.vertices())
      if (dist(mid, v) < 1e-12) at_vertex = true;
    CHECK(at_vertex);
  }
  SECTION("mirrored double application returns x") {
    std::mt19937_64 rng(61);
    int done = 0;
    while (done < 300) {
      Point2 x = rand_exterior(rng, sq, 1.6, 20.0);
      Point2 y;
      try {
        y = outer_area_step(sq, x);
      } catch (const error&) {
        continue;
      }
      SupportContacts c;
      try {
        c = support_contacts(sq, y);
      } catch (const error&) {
        continue;
      }
      ++done;
      // reflecting back through y's left contact (the same vertex) undoes it
      Point2 p = 0.5 * (x + y);
      CHECK(dist(sq.vertex(c.left), p) <= 1e-9);
      CHECK(dist(2.0 * sq.vertex(c.left) - y, x) <= 1e-9);
    }
  }
  SECTION("edge-aligned points are singular") {
    CHECK_THROWS_AS(outer_area_step(sq, {-2, -1}), error);
  }
}

TEST_CASE("variational criticality") {
  auto sq = make_square();
  double d = sq.diameter();
  std::mt19937_64 rng(71);
  SECTION("residual vanishes on orbits") {
    int done = 0;
    while (done < 100) {
      Point2 x = rand_exterior(rng, sq, 2.0, 20.0);
      double r;
      try {
        r = variational_residual(sq, x, 1e-5);
      } catch (const error&) {
        continue;
      }
      ++done;
      CHECK(r < 1e-6 * d);
    }
  }
  SECTION("2-gon residual") {
    auto seg = make_segment();
    CHECK(variational_residual(seg, {0, 2}, 1e-5) < 1e-6);
  }
  SECTION("perturbed configurations are non-critical") {
    int done = 0;
    while (done < 50) {
      Point2 x = rand_exterior(rng, sq, 2.0, 20.0);
      double r;
      try {
        r = variational_residual(sq, x, 1e-5, 1e-2);
      } catch (const error&) {
        continue;
      }
      ++done;
      CHECK(r > 1e-4);
    }
  }
  SECTION("grid oracle: interior extremum at zero rotation") {
    Point2 x{3.1, 0.4};
    StepRecord s0 = step(sq, x);
    StepRecord s1 = step(sq, s0.y);
    Point2 pivot = s1.tangency;
    Point2 B = sq.vertex(s1.third_vertex);
    auto L = [&](double phi) {
      DirectedLine mid{pivot, rotated(s1.l2.direction, phi)};
      Point2 c1 = intersect_or_fail(s0.l2, mid);
      Point2 c2 = intersect_or_fail(mid, s1.l3);
      return dist(x, c1) + dist(c1, c2) + dist(c2, B);
    };
    double L0 = L(0.0);
    // one-signed second-order growth on both sides
    double dplus = L(4e-3) - L0, dminus = L(-4e-3) - L0;
    CHECK(dplus * dminus > 0.0);
    CHECK(std::abs(dplus) > 1e-9);
  }
}
