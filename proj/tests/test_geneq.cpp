#include <doctest.h>

#include <cmath>
#include <random>

#include "varistab/catalog.hpp"
#include "varistab/errors.hpp"
#include "varistab/geneq.hpp"

using namespace varistab;

namespace {

GenEqSpec fold_spec() {
  GenEqSpec s;
  s.name = "fold";
  s.dims = {1, 1, 1};
  s.base = BaseFn(
      s.dims, [](const Vector& p, const Vector& x) { return Vector{x[0] * x[0] - p[0]}; },
      [](const Vector&, const Vector& x) { return Matrix{{2.0 * x[0]}}; });
  s.field = [](const Vector&, const Vector&) { return ClosedSet::singleton({0.0}); };
  s.p_ref = {0.0};
  s.x_ref = {0.0};
  s.p_region = {{-1}, {1}};
  s.x_region = {{-2}, {2}};
  return s;
}

}  // namespace

TEST_CASE("jacobian finite-difference error is small for an exact Jacobian") {
  const BaseFn f(
      {1, 2, 2},
      [](const Vector& p, const Vector& x) { return Vector{x[0] * x[1] - p[0], std::sin(x[0]) + x[1] * x[1]}; },
      [](const Vector&, const Vector& x) { return Matrix{{x[1], x[0]}, {std::cos(x[0]), 2 * x[1]}}; });
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 20; ++i) {
    const Vector x{u(rng), u(rng)}, v{u(rng), u(rng)};
    CHECK(jacobian_fd_error(f, {0.3}, x, v) < 1e-4);
  }
  const BaseFn wrong(
      {1, 1, 1}, [](const Vector&, const Vector& x) { return Vector{x[0] * x[0]}; },
      [](const Vector&, const Vector&) { return Matrix{{0.0}}; });
  CHECK(jacobian_fd_error(wrong, {0}, {1}, {1}) > 1.0);
  const BaseFn none({1, 1, 1}, [](const Vector&, const Vector& x) { return x; });
  CHECK_THROWS_AS(none.jacobian({0}, {0}), Unsupported);
  CHECK(BaseFn::zero({1, 2, 3})({1}, {1, 1}) == Vector{0, 0, 0});
}

TEST_CASE("problem construction rejects a reference that does not solve the equation") {
  GenEqSpec s = fold_spec();
  s.x_ref = {0.5};
  CHECK_THROWS_AS(GenEqProblem{s}, ContractViolation);
  const GenEqProblem ok(fold_spec());
  CHECK(ok.y_ref() == Vector{0.0});
}

TEST_CASE("displacement and graph displacement") {
  const GenEqProblem prob(fold_spec());
  CHECK(displacement(prob, {0.25}, {0.5}) == doctest::Approx(0.0));
  CHECK(displacement(prob, {0.0}, {0.5}) == doctest::Approx(0.25));
  CHECK(graph_displacement(prob, {0.5}, {0.0}) == doctest::Approx(0.25));
  CHECK(graph_displacement(prob, {0.5}, {0.1}) == kInf);
}

TEST_CASE("solve_on_grid matches the brute-force solution set") {
  const GenEqProblem prob(fold_spec());
  const double step = 1.0 / 64;
  const auto sol = solve_on_grid(prob, {0.25}, prob.x_region(), step, 1e-9);
  // Brute force: grid points with |x^2 - 1/4| <= 1e-9.
  std::vector<Vector> expect;
  for (int i = -128; i <= 128; ++i) {
    const double x = i * step;
    if (std::abs(x * x - 0.25) <= 1e-9) expect.push_back({x});
  }
  CHECK(sol.points == expect);
  CHECK(solve_on_grid(prob, {-0.5}, prob.x_region(), step).points.empty());
  CHECK_THROWS_AS(solve_on_grid(prob, {0}, prob.x_region(), 1e-8), BudgetExceeded);
}

TEST_CASE("region helpers") {
  const Region r{{-1, 0}, {1, 2}};
  CHECK(r.contains({0, 1}));
  CHECK(!r.contains({0, 3}));
  CHECK(r.radius() > 0.0);
}

TEST_CASE("lower semicontinuity of the displacement") {
  const GenEqProblem prob(fold_spec());
  CHECK(displacement_lsc_check(prob, {0}, {0}, RadiusSchedule{}).holds);
  // halfline_jump: F(p, x) jumps at p = 0, but psi(p, .) stays lsc in x.
  const CatalogEntry e = catalog_entry("halfline_jump");
  CHECK(displacement_lsc_check(*e.geneq, {0.1}, {0}, RadiusSchedule{}).holds);
}
