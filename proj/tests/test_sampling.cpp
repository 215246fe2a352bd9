#include "doctest.h"

#include <cmath>
#include <set>

#include "gaugekit/sampling.hpp"

using namespace gaugekit;

TEST_CASE("gauss_legendre nodes and weights at small orders") {
  // one node: the midpoint rule on [0, 1]
  auto one = gauss_legendre(1);
  REQUIRE(one.size() == 1);
  CHECK(one[0].t == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(one[0].weight == doctest::Approx(1.0).epsilon(1e-14));

  // two nodes: (1 -+ 1/sqrt(3)) / 2 with equal weights
  auto two = gauss_legendre(2);
  REQUIRE(two.size() == 2);
  const double node = 0.5 * (1.0 - 1.0 / std::sqrt(3.0));
  CHECK(two[0].t == doctest::Approx(node).epsilon(1e-14));
  CHECK(two[1].t == doctest::Approx(1.0 - node).epsilon(1e-14));
  CHECK(two[0].weight == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(two[1].weight == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("gauss_legendre integrates polynomials of degree 2K-1 exactly") {
  for (int nodes : {1, 2, 3, 4, 8, 12}) {
    auto rule = gauss_legendre(nodes);
    double weight_sum = 0.0;
    for (const auto& q : rule) weight_sum += q.weight;
    CHECK(weight_sum == doctest::Approx(1.0).epsilon(1e-14));
    for (int degree = 0; degree <= 2 * nodes - 1; ++degree) {
      double acc = 0.0;
      for (const auto& q : rule) acc += q.weight * std::pow(q.t, degree);
      CHECK(acc == doctest::Approx(1.0 / (degree + 1)).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(gauss_legendre(0), ShapeError);
}

TEST_CASE("sample points stay inside the box and are seed-deterministic") {
  ChartDomain box(3, {{-2.0, 1.0}, {0.5, 0.75}, {-1.0, -0.25}});
  auto a = sample_points(box, 200, 7);
  auto b = sample_points(box, 200, 7);
  auto c = sample_points(box, 200, 8);
  REQUIRE(a.size() == 200);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(box.contains(a[i], 0.0));
    CHECK((a[i] - b[i]).norm() == 0.0);
  }
  // a different seed moves the points
  bool any_moved = false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if ((a[i] - c[i]).norm() > 0) any_moved = true;
  CHECK(any_moved);
}

TEST_CASE("sample points are distinct and fill the box") {
  ChartDomain box = ChartDomain::unit(2);
  auto points = sample_points(box, 128, 3);
  std::set<std::pair<double, double>> seen;
  double min0 = 1e300, max0 = -1e300;
  for (const Point& x : points) {
    seen.insert({x[0], x[1]});
    min0 = std::min(min0, x[0]);
    max0 = std::max(max0, x[0]);
  }
  CHECK(seen.size() == points.size());
  // the sequence spreads across the box rather than clustering
  CHECK(min0 < -0.5);
  CHECK(max0 > 0.5);
}
