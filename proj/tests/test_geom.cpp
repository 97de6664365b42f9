#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "olb/geom.hpp"
#include "olb/tables.hpp"

using namespace olb;

namespace {

// Brute-force support/width oracle over a theta grid, independent of the
// library's width machinery.
double oracle_min_width(const ConvexPolygon& P, int grid = 100000) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid; ++i) {
    double t = M_PI * i / grid;
    Vec2 u{std::cos(t), std::sin(t)};
    double hi = -1e300, lo = 1e300;
    for (auto& v : P.vertices()) {
      double s = dot(v, u);
      hi = std::max(hi, s);
      lo = std::min(lo, s);
    }
    best = std::min(best, hi - lo);
  }
  return best;
}

// Dense-sampling oracle for radial extremes.
std::pair<double, double> oracle_extremes(const EllipseFoci& E, int n = 2000000) {
  double lo = 1e300, hi = -1e300;
  for (int i = 0; i < n; ++i) {
    double r = norm(E.point_at(2.0 * M_PI * i / n));
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  return {lo, hi};
}

Point2 rand_point(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  return {u(rng), u(rng)};
}

}  // namespace

TEST_CASE("polygon metrics") {
  auto sq = make_square();
  auto m = polygon_metrics(sq);
  CHECK(m.diameter == Catch::Approx(2.0 * std::sqrt(2.0)));
  CHECK(m.perimeter == Catch::Approx(8.0));
  CHECK(m.contains_origin);
  // min width oracle: brute force over support directions
  CHECK(m.min_width == Catch::Approx(oracle_min_width(sq)).epsilon(1e-6));
  CHECK(m.aspect_ratio == Catch::Approx(std::sqrt(2.0)).epsilon(1e-6));

  auto seg = ConvexPolygon({{0, 0}, {1, 0}});
  auto ms = polygon_metrics(seg);
  CHECK(ms.diameter == Catch::Approx(1.0));
  CHECK(ms.perimeter == Catch::Approx(2.0));
  CHECK_FALSE(ms.contains_origin);

  auto pent = make_regular(5);
  auto mp = polygon_metrics(pent);
  CHECK(mp.min_width == Catch::Approx(oracle_min_width(pent)).epsilon(1e-6));
}

TEST_CASE("polygon validation") {
  CHECK_THROWS_AS(ConvexPolygon({{0, 0}}), error);
  CHECK_THROWS_AS(ConvexPolygon({{0, 0}, {1, 0}, {2, 0}}), error);  // collinear
  CHECK_THROWS_AS(ConvexPolygon({{0, 0}, {0, 1}, {1, 1}, {1, 0}}), error);  // CW
  CHECK_THROWS_AS(ConvexPolygon({{0, 0}, {1, 0}, {1, 0}}), error);  // repeat
  CHECK_NOTHROW(ConvexPolygon({{0, 0}, {1, 0}, {0, 1}}));
}

TEST_CASE("support contacts on the square") {
  auto sq = make_square();  // v0=(1,1) v1=(-1,1) v2=(-1,-1) v3=(1,-1)
  auto c = support_contacts(sq, {3, 0});
  CHECK(sq.vertex(c.left).x == Catch::Approx(1.0));
  CHECK(sq.vertex(c.left).y == Catch::Approx(-1.0));
  CHECK(sq.vertex(c.right).x == Catch::Approx(1.0));
  CHECK(sq.vertex(c.right).y == Catch::Approx(1.0));

  c = support_contacts(sq, {0, 3});
  CHECK(sq.vertex(c.left).x == Catch::Approx(1.0));
  CHECK(sq.vertex(c.left).y == Catch::Approx(1.0));
  CHECK(sq.vertex(c.right).x == Catch::Approx(-1.0));
  CHECK(sq.vertex(c.right).y == Catch::Approx(1.0));

  // clockwise extension of the top side
  CHECK_THROWS_MATCHES(support_contacts(sq, {3, 1}), error,
                       Catch::Matchers::Predicate<error>([](const error& e) {
                         return e.code() == errc::on_singular_ray;
                       }));
  // counter-clockwise extension: contact exists but the left label is
  // ambiguous
  CHECK_THROWS_MATCHES(support_contacts(sq, {-3, 1}), error,
                       Catch::Matchers::Predicate<error>([](const error& e) {
                         return e.code() == errc::edge_aligned;
                       }));
  CHECK_THROWS_MATCHES(support_contacts(sq, {0, 0}), error,
                       Catch::Matchers::Predicate<error>([](const error& e) {
                         return e.code() == errc::point_inside;
                       }));
}

TEST_CASE("support contacts: all vertices on one closed side") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    auto P = make_random(5, rng());
    double d = P.diameter();
    Point2 x;
    for (;;) {
      x = rand_point(rng, -6, 6);
      if (norm(x) < 1.2) continue;
      break;
    }
    SupportContacts c;
    try {
      c = support_contacts(P, x);
    } catch (const error&) {
      continue;
    }
    DirectedLine l1 = DirectedLine::through(P.vertex(c.left), x);
    DirectedLine l2 = DirectedLine::through(x, P.vertex(c.right));
    for (auto& v : P.vertices()) {
      CHECK(l1.signed_dist(v) >= -1e-9 * d);
      CHECK(l2.signed_dist(v) >= -1e-9 * d);
    }
  }
}

TEST_CASE("auxiliary circle closed forms") {
  // l2 = x-axis directed -x (table below), p at the origin, circle above
  DirectedLine l2{{0, 0}, {-1, 0}};
  SECTION("vertical l1 at x=-2") {
    DirectedLine l1{{-2, 0}, {0, -1}};  // table (below/right of it) on the left
    auto c = auxiliary_circle(l1, l2, {0, 0});
    CHECK(c.center.x == Catch::Approx(0.0).margin(1e-12));
    CHECK(c.center.y == Catch::Approx(2.0));
    CHECK(c.radius == Catch::Approx(2.0));
  }
  SECTION("l1: y = x + 2") {
    // direction chosen with the lower half-plane on the left
    DirectedLine l1{{-2, 0}, {-std::sqrt(0.5), -std::sqrt(0.5)}};
    auto c = auxiliary_circle(l1, l2, {0, 0});
    double t = 2.0 * (std::sqrt(2.0) - 1.0);
    CHECK(c.center.y == Catch::Approx(t));
    CHECK(c.radius == Catch::Approx(t));
  }
  SECTION("parallel lines y=0, y=4") {
    DirectedLine l1{{0, 4}, {-1, 0}};
    auto c = auxiliary_circle(l1, l2, {0, 0});
    CHECK(c.center.y == Catch::Approx(2.0));
    CHECK(c.radius == Catch::Approx(2.0));
  }
  SECTION("wrong side gives no solution") {
    DirectedLine l1{{0, -1}, {1, 0}};  // p strictly on its wrong side
    CHECK_THROWS_MATCHES(auxiliary_circle(l1, l2, {0, 0}), error,
                         Catch::Matchers::Predicate<error>([](const error& e) {
                           return e.code() == errc::no_solution;
                         }));
  }
}

TEST_CASE("auxiliary circle tangency invariant") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ang(0, 2 * M_PI);
  int checked = 0;
  while (checked < 2000) {
    // random wedge: l2 through p, l1 somewhere left of p
    Point2 p = rand_point(rng, -2, 2);
    double a2 = ang(rng), a1 = ang(rng);
    DirectedLine l2{p, {std::cos(a2), std::sin(a2)}};
    Point2 o1 = rand_point(rng, -2, 2);
    DirectedLine l1{o1, {std::cos(a1), std::sin(a1)}};
    Circle c;
    try {
      c = auxiliary_circle(l1, l2, p);
    } catch (const error&) {
      continue;
    }
    if (c.radius > 1e4) continue;
    ++checked;
    CHECK(std::abs(std::abs(l1.signed_dist(c.center)) - c.radius) <=
          1e-10 * c.radius + 1e-12);
    CHECK(std::abs(std::abs(l2.signed_dist(c.center)) - c.radius) <=
          1e-10 * c.radius + 1e-12);
    CHECK(dist(l2.foot(c.center), p) <= 1e-9 * (1.0 + c.radius));
  }
}

TEST_CASE("third support line on the segment table") {
  // construction at x=(0,2) around the segment (-1,0)-(1,0): tangency at the
  // right contact (-1,0), circle center (-5,2), radius 2*sqrt(5); the third
  // support line passes through the left contact (1,0).
  auto seg = make_segment();
  DirectedLine l1{{1, 0}, normalized(Point2{0, 2} - Point2{1, 0})};
  DirectedLine l2{{-1, 0}, normalized(Point2{-1, 0} - Point2{0, 2})};
  auto c = auxiliary_circle(l1, l2, {-1, 0});
  CHECK(c.center.x == Catch::Approx(-5.0));
  CHECK(c.center.y == Catch::Approx(2.0));
  CHECK(c.radius == Catch::Approx(2.0 * std::sqrt(5.0)));

  auto third = third_support_line(seg, c, l1, l2);
  CHECK(seg.vertex(third.contact_vertex).x == Catch::Approx(1.0));
  // y = l2 cap l3
  Point2 y = intersect_or_fail(l2, third.line);
  CHECK(y.x == Catch::Approx(-5.0 / 3.0));
  CHECK(y.y == Catch::Approx(-4.0 / 3.0));
}

TEST_CASE("third support line: disjoint circle has none") {
  auto sq = make_square();
  Circle inside{{0, 0}, 0.25};
  DirectedLine dummy1{{100, 100}, {1, 0}};
  DirectedLine dummy2{{100, 100}, {0, 1}};
  CHECK_THROWS_MATCHES(third_support_line(sq, inside, dummy1, dummy2), error,
                       Catch::Matchers::Predicate<error>([](const error& e) {
                         return e.code() == errc::not_found;
                       }));
}

TEST_CASE("ellipse radial extremes") {
  SECTION("circle") {
    EllipseFoci E({0, 0}, {0, 0}, 2.0);
    auto [m, M] = ellipse_radial_extremes(E);
    CHECK(m == Catch::Approx(1.0));
    CHECK(M == Catch::Approx(1.0));
  }
  SECTION("centered, through (0,1)") {
    EllipseFoci E({-1, 0}, {1, 0}, 2.0 * std::sqrt(2.0));
    auto [m, M] = ellipse_radial_extremes(E);
    CHECK(m == Catch::Approx(1.0));
    CHECK(M == Catch::Approx(std::sqrt(2.0)));
  }
  SECTION("offset ellipse against the dense-sampling oracle") {
    EllipseFoci E({3, 0}, {5, 0}, 4.0);
    auto [m, M] = ellipse_radial_extremes(E);
    auto [om, oM] = oracle_extremes(E);
    CHECK(m == Catch::Approx(om).margin(1e-9));
    CHECK(M == Catch::Approx(oM).margin(1e-9));
    // analytically the extremes sit on the x-axis: [2, 6]
    CHECK(m == Catch::Approx(2.0));
    CHECK(M == Catch::Approx(6.0));
  }
  SECTION("random ellipses against the oracle") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 25; ++t) {
      Point2 f1 = rand_point(rng, -2, 2), f2 = rand_point(rng, -2, 2);
      double c = dist(f1, f2);
      std::uniform_real_distribution<double> extra(0.1, 3.0);
      EllipseFoci E(f1, f2, c + extra(rng));
      auto [m, M] = ellipse_radial_extremes(E);
      auto [om, oM] = oracle_extremes(E, 200000);
      CHECK(m == Catch::Approx(om).margin(1e-6));
      CHECK(M == Catch::Approx(oM).margin(1e-6));
    }
  }
}

TEST_CASE("ellipse hausdorff") {
  EllipseFoci A({-1, 0}, {1, 0}, 4.0);
  CHECK(ellipse_hausdorff(A, A, 256) <= 1e-9);

  EllipseFoci c1({0, 0}, {0, 0}, 2.0), c2({0, 0}, {0, 0}, 4.0);
  CHECK(ellipse_hausdorff(c1, c2, 512) == Catch::Approx(1.0).margin(1e-6));

  EllipseFoci e1({-1, 0}, {1, 0}, 4.0), e2({-1, 0}, {1, 0}, 4.2);
  double dh = ellipse_hausdorff(e1, e2, 512);
  CHECK(dh <= 0.2 + 1e-6);
  CHECK(dh >= 0.1 - 1e-6);
}

TEST_CASE("ellipse lemma properties") {
  std::mt19937_64 rng(17);
  const double d = 1.0;
  SECTION("eccentricity bound M - m <= 5d") {
    std::uniform_real_distribution<double> amp(0.0, 1.0);
    for (int t = 0; t < 2000; ++t) {
      double cang = amp(rng) * 2 * M_PI;
      Point2 mid = 2.0 * d * amp(rng) * Point2{std::cos(cang), std::sin(cang)};
      double halff = d * amp(rng);
      double dir = amp(rng) * 2 * M_PI;
      Point2 off{halff * std::cos(dir), halff * std::sin(dir)};
      std::uniform_real_distribution<double> extra(1e-3, 40.0);
      EllipseFoci E(mid - off, mid + off, 2 * halff + extra(rng));
      auto [m, M] = ellipse_radial_extremes(E);
      CHECK(M - m <= 5.0 * d + 1e-7);
    }
  }
  SECTION("foci nesting") {
    std::uniform_real_distribution<double> u(-2, 2), pos(0.2, 2.0);
    for (int t = 0; t < 500; ++t) {
      Point2 A = rand_point(rng, -2, 2);
      Point2 B = rand_point(rng, -2, 2);
      Vec2 dirv = normalized(rand_point(rng, -1, 1) + Point2{1.3, 0.7});
      Point2 C = B + pos(rng) * dirv;
      Point2 D = C + pos(rng) * dirv;
      EllipseFoci E1(A, B, focal_sum_at(A, B, D));
      EllipseFoci E2(A, C, focal_sum_at(A, C, D));
      bool nested = true;
      for (int i = 0; i < 256; ++i) {
        Point2 p = E2.point_at(2 * M_PI * i / 256.0);
        if (focal_sum_at(A, B, p) > E1.focal_sum + 1e-9) nested = false;
      }
      CHECK(nested);
    }
  }
  SECTION("confocal bound") {
    std::uniform_real_distribution<double> fpos(0.1, 1.0), apos(0.0, 1.0);
    for (int t = 0; t < 60; ++t) {
      double f = fpos(rng);
      double a1 = 2.0 * f + apos(rng);           // eccentricity <= 1/2
      double a2 = a1 + 0.3 * apos(rng);
      EllipseFoci E1({-f, 0}, {f, 0}, 2 * a1);
      EllipseFoci E2({-f, 0}, {f, 0}, 2 * a2);
      CHECK(ellipse_hausdorff(E1, E2, 256) <= 2.0 * (a2 - a1) + 1e-6);
    }
  }
}
