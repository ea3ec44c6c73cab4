#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "pocmw/geometry.hpp"

using namespace pocmw;

TEST_CASE("box projection clamps per axis") {
  auto body = ConvexBody::box({0.0, 0.0}, {1.0, 1.0});
  Point p = body.project(Point{1.5, -0.3});
  CHECK(p[0] == doctest::Approx(1.0));
  CHECK(p[1] == doctest::Approx(0.0));
}

TEST_CASE("ball projection is radial") {
  auto body = ConvexBody::ball({0.0, 0.0}, 1.0);
  Point p = body.project(Point{3.0, 4.0});
  CHECK(p[0] == doctest::Approx(0.6));
  CHECK(p[1] == doctest::Approx(0.8));
}

TEST_CASE("projection of a member point is the point") {
  auto box = ConvexBody::box({-1.0}, {1.0});
  CHECK(box.project(Point{0.25})[0] == doctest::Approx(0.25));
  auto ball = ConvexBody::ball({0.0, 0.0, 0.0}, 2.0);
  Point inside{0.5, -0.5, 1.0};
  Point proj = ball.project(inside);
  for (int i = 0; i < 3; ++i) CHECK(proj[i] == doctest::Approx(inside[i]));
}

TEST_CASE("projection is idempotent and non-expansive") {
  auto bodies = std::vector<ConvexBody>{
      ConvexBody::box({-1.0, -2.0}, {2.0, 1.0}),
      ConvexBody::ball({0.1, -0.1}, 1.5),
      ConvexBody::polytope({{{1.0, 1.0}, 1.0}, {{-1.0, 1.0}, 1.0}}, {-2.0, -2.0},
                           {2.0, 2.0}),
  };
  RandomStream rng(11);
  for (const auto& body : bodies) {
    for (int i = 0; i < 1000; ++i) {
      Point x{rng.uniform_in(-4, 4), rng.uniform_in(-4, 4)};
      Point y{rng.uniform_in(-4, 4), rng.uniform_in(-4, 4)};
      Point px = body.project(x);
      Point py = body.project(y);
      CHECK(body.contains(px, 1e-7));
      Point ppx = body.project(px);
      CHECK(distance(ppx, px) <= 1e-12);
      CHECK(distance(px, py) <= distance(x, y) + 1e-9);
    }
  }
}

TEST_CASE("interval grid uses cell midpoints") {
  auto body = ConvexBody::box({0.0}, {1.0});
  auto nodes = body.grid_points(4);
  REQUIRE(nodes.size() == 4);
  CHECK(nodes[0].x[0] == doctest::Approx(0.125));
  CHECK(nodes[1].x[0] == doctest::Approx(0.375));
  CHECK(nodes[2].x[0] == doctest::Approx(0.625));
  CHECK(nodes[3].x[0] == doctest::Approx(0.875));
  double total = 0.0;
  for (const auto& n : nodes) {
    CHECK(n.weight == doctest::Approx(0.25));
    total += n.weight;
  }
  CHECK(total == doctest::Approx(1.0));
}

TEST_CASE("disk grid weights approximate the area") {
  auto body = ConvexBody::ball({0.0, 0.0}, 1.0);
  auto nodes = body.grid_points(64);
  double total = 0.0;
  for (const auto& n : nodes) {
    CHECK(body.contains(n.x));
    total += n.weight;
  }
  CHECK(std::abs(total - M_PI) < 0.05);
}

TEST_CASE("grid nodes pass membership for a polytope") {
  auto body = ConvexBody::polytope({{{1.0, 1.0}, 1.0}}, {-1.0, -1.0}, {1.0, 1.0});
  for (const auto& n : body.grid_points(16)) CHECK(body.contains(n.x));
}

TEST_CASE("construction rejects degenerate and origin-free bodies") {
  CHECK_THROWS_AS(ConvexBody::box({0.0, 0.0}, {1.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(ConvexBody::box({0.5}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(ConvexBody::ball({3.0}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ConvexBody::ball({0.0}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(ConvexBody::polytope({{{1.0}, -0.5}}, {-1.0}, {1.0}),
                  std::invalid_argument);
}

TEST_CASE("dimension mismatch is a contract violation") {
  auto body = ConvexBody::box({0.0}, {1.0});
  CHECK_THROWS_AS(body.project(Point{0.1, 0.2}), std::invalid_argument);
  CHECK_THROWS_AS(
      ConvexBody::box({0.0, 0.0, 0.0, 0.0}, {1.0, 1.0, 1.0, 1.0}).grid_points(4),
      std::domain_error);
}

TEST_CASE("stored diameter dominates sampled member distances") {
  auto bodies = std::vector<ConvexBody>{
      ConvexBody::box({-1.0, -0.5}, {0.5, 1.0}),
      ConvexBody::ball({0.2, 0.0}, 1.5),
      ConvexBody::polytope({{{1.0, 1.0}, 1.2}, {{-1.0, 0.5}, 0.9}}, {-1.0, -1.0},
                           {1.0, 1.0}),
  };
  RandomStream rng(2);
  for (const auto& body : bodies)
    for (int i = 0; i < 500; ++i) {
      Point a = random_point(body, rng);
      Point b = random_point(body, rng);
      CHECK(distance(a, b) <= body.diameter() + 1e-9);
    }
}

TEST_CASE("random streams are pure functions of seed and counter") {
  RandomStream a(123), b(123);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  CHECK(a.counter() == 100);
  // derived streams are decorrelated from the parent and reproducible
  RandomStream c = a.derive(7), d = b.derive(7);
  CHECK(c.uniform() == d.uniform());
  CHECK(a.derive(7).seed() != a.derive(8).seed());
}

TEST_CASE("polytope projection lands inside within tolerance") {
  auto body = ConvexBody::polytope(
      {{{1.0, 0.5}, 1.0}, {{-0.3, 1.0}, 0.8}, {{0.0, -1.0}, 0.6}}, {-2.0, -2.0},
      {2.0, 2.0});
  RandomStream rng(5);
  for (int i = 0; i < 200; ++i) {
    Point x{rng.uniform_in(-5, 5), rng.uniform_in(-5, 5)};
    CHECK(body.contains(body.project(x), 1e-7));
  }
}

TEST_CASE("polytope projection is the nearest member point") {
  // optimality via the variational inequality: <x - p, y - p> <= 0 for all
  // feasible y when p is the Euclidean projection of x
  auto body = ConvexBody::polytope(
      {{{1.0, 0.5}, 1.0}, {{-0.3, 1.0}, 0.8}, {{0.0, -1.0}, 0.6}, {{1.0, -1.0}, 1.4}},
      {-2.0, -2.0}, {2.0, 2.0});
  RandomStream rng(23);
  for (int i = 0; i < 50; ++i) {
    Point x{rng.uniform_in(-6, 6), rng.uniform_in(-6, 6)};
    Point p = body.project(x);
    for (int j = 0; j < 200; ++j) {
      Point y = random_point(body, rng);
      double inner = (x[0] - p[0]) * (y[0] - p[0]) + (x[1] - p[1]) * (y[1] - p[1]);
      CHECK(inner <= 1e-5);
    }
  }
}
