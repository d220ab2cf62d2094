#include <doctest.h>

#include <cmath>
#include <random>

#include "varistab/errors.hpp"
#include "varistab/metric.hpp"

using namespace varistab;

namespace {

// Brute-force distance: minimum over a fine grid of members of the set.
double grid_distance(const ClosedSet& s, const Vector& y, const Vector& lo, const Vector& hi, double step) {
  double best = kInf;
  for (const auto& z : grid_points(lo, hi, step)) {
    if (s.contains(z, 1e-12)) best = std::min(best, euclidean_norm(sub(z, y)));
  }
  return best;
}

}  // namespace

TEST_CASE("vector helpers") {
  CHECK(add({1, 2}, {3, 4}) == Vector{4, 6});
  CHECK(sub({1, 2}, {3, 4}) == Vector{-2, -2});
  CHECK(axpy({1, 1}, 2.0, {1, -1}) == Vector{3, -1});
  CHECK(dot({1, 2}, {3, 4}) == doctest::Approx(11));
  CHECK(euclidean_norm({3, 4}) == doctest::Approx(5));
  CHECK(concat({1}, {2, 3}) == Vector{1, 2, 3});
  CHECK(slice({1, 2, 3}, 1, 2) == Vector{2, 3});
  CHECK(unit_vector(3, 1, -1.0) == Vector{0, -1, 0});
  CHECK_THROWS_AS(require_finite({1.0, std::nan("")}, "v"), ContractViolation);
  CHECK_THROWS_AS(require_dim({1.0}, 2, "v"), ContractViolation);
}

TEST_CASE("block metric is the sum of block norms and its dual is the max") {
  const Metric m = Metric::blocks({1, 2});
  CHECK(m.norm({1, 3, 4}) == doctest::Approx(6));
  CHECK(m.distance({0, 0, 0}, {-1, 3, 4}) == doctest::Approx(6));
  CHECK(m.dual_norm({2, 3, 4}) == doctest::Approx(5));
  // Dual norm by brute force: sup of <v, u> over the unit sphere of the metric.
  const Vector v{0.7, -1.2, 0.4};
  double sup = 0.0;
  const int n = 400;
  for (int i = 0; i <= n; ++i) {
    const double a = static_cast<double>(i) / n;
    for (int k = 0; k < 64; ++k) {
      const double t = 2.0 * M_PI * k / 64.0;
      for (double s : {-1.0, 1.0}) {
        const Vector u{s * a, (1 - a) * std::cos(t), (1 - a) * std::sin(t)};
        sup = std::max(sup, dot(v, u));
      }
    }
  }
  CHECK(m.dual_norm(v) == doctest::Approx(sup).epsilon(1e-3));
  const Metric e = Metric::euclidean();
  CHECK(e.dual_norm({3, 4}) == doctest::Approx(5));
}

TEST_CASE("box distance and projection against a grid oracle") {
  const ClosedSet box = ClosedSet::box({-1, 0}, {1, 0.5});
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int i = 0; i < 10; ++i) {
    const Vector y{u(rng), u(rng)};
    const double d = box.distance(y);
    CHECK(d <= grid_distance(box, y, {-1, 0}, {1, 0.5}, 1.0 / 64) + 1e-12);
    CHECK(d >= grid_distance(box, y, {-1, 0}, {1, 0.5}, 1.0 / 64) - 1.0 / 64);
    const Vector pr = box.project(y);
    CHECK(box.contains(pr));
    CHECK(euclidean_norm(sub(pr, y)) == doctest::Approx(d));
  }
  CHECK(ClosedSet::box({0}, {kInf}).distance({-3}) == doctest::Approx(3));
}

TEST_CASE("polyhedron projection against a grid oracle") {
  // Triangle x >= 0, y >= 0, x + y <= 1.
  const ClosedSet tri = ClosedSet::polyhedron({{{-1, 0}, 0}, {{0, -1}, 0}, {{1, 1}, 1}}, 2);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.5, 2.5);
  for (int i = 0; i < 10; ++i) {
    const Vector y{u(rng), u(rng)};
    const double d = tri.distance(y);
    const double brute = grid_distance(tri, y, {0, 0}, {1, 1}, 1.0 / 128);
    CHECK(d <= brute + 1e-9);
    CHECK(d >= brute - 1.0 / 128);
    CHECK(tri.contains(tri.project(y), 1e-7));
  }
  const ClosedSet empty = ClosedSet::polyhedron({{{1}, 0}, {{-1}, -1}}, 1);
  CHECK(empty.empty());
}

TEST_CASE("ball, singleton, whole space, outside ball") {
  const ClosedSet b = ClosedSet::ball({1, 1}, 0.5);
  CHECK(b.distance({1, 3}) == doctest::Approx(1.5));
  CHECK(b.distance({1, 1.2}) == doctest::Approx(0));
  CHECK(ClosedSet::singleton({2}).distance({-1}) == doctest::Approx(3));
  CHECK(ClosedSet::whole_space(3).distance({5, 5, 5}) == 0.0);
  const ClosedSet out = ClosedSet::outside_ball(2, 1.0);
  CHECK(out.distance({0.25, 0}) == doctest::Approx(0.75));
  CHECK(out.distance({2, 0}) == 0.0);
  CHECK(!out.convex());
  CHECK(ClosedSet::outside_ball(1, 0.0).distance({0}) == 0.0);
}

TEST_CASE("union and product") {
  const ClosedSet u = ClosedSet::set_union({ClosedSet::interval(-kInf, -1), ClosedSet::singleton({0})}, 1);
  CHECK(u.distance({-0.4}) == doctest::Approx(0.4));
  CHECK(u.distance({-0.7}) == doctest::Approx(0.3));
  CHECK(u.project({-0.7}) == Vector{-1});
  const ClosedSet p = ClosedSet::product({ClosedSet::singleton({0}), ClosedSet::interval(0, kInf)});
  CHECK(p.dim() == 2);
  // Products carry the sum of the block metrics.
  CHECK(p.distance({3, -4}) == doctest::Approx(7));
  CHECK(p.contains({0, 2}));
}

TEST_CASE("cloud distance and excess") {
  const ClosedSet c = ClosedSet::cloud({{0}, {1}, {3}}, 1);
  CHECK(c.distance({2.2}) == doctest::Approx(0.8));
  CHECK(c.project({2.2}) == Vector{3});
  CHECK(excess({{0.5}, {4}}, c) == doctest::Approx(1.0));
  CHECK(excess({}, c) == 0.0);
}

TEST_CASE("grid points") {
  const auto g = grid_points({0, 0}, {1, 0.5}, 0.25);
  CHECK(g.size() == 15);
  CHECK(grid_size({0}, {1}, 0.125) == 9);
  CHECK_THROWS_AS(grid_points({0, 0}, {1, 1}, 1e-5, 1000), BudgetExceeded);
}
