#include <doctest.h>

#include <cmath>

#include "varistab/catalog.hpp"
#include "varistab/dual.hpp"
#include "varistab/errors.hpp"

using namespace varistab;

namespace {

// Sampled Fréchet inequality: f(z) - f(x) - <v, z - x> >= -tol |z - x| for z
// on small spheres around x.
bool frechet_inequality(const CatalogFunction& f, const Vector& x, const Vector& v) {
  const double fx = f(x);
  for (double r : {1e-3, 1e-4, 1e-5}) {
    for (int k = 0; k < 64; ++k) {
      Vector d(x.size(), 0.0);
      if (x.size() == 1) {
        d[0] = k % 2 ? 1.0 : -1.0;
      } else {
        d[0] = std::cos(2 * M_PI * k / 64);
        d[1] = std::sin(2 * M_PI * k / 64);
      }
      const Vector z = axpy(x, r, d);
      const double fz = f(z);
      if (!std::isfinite(fz)) continue;
      if (fz - fx - dot(v, sub(z, x)) < -1e-2 * r) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("subdifferential of abs") {
  const CatalogFunction f = CatalogFunction::abs_affine({1}, 0);
  const auto s0 = f.subdifferential({0});
  CHECK(s0.lo() == doctest::Approx(-1));
  CHECK(s0.hi() == doctest::Approx(1));
  CHECK(s0.min_norm(Metric()) == doctest::Approx(0));
  CHECK(f.subdifferential({0.3}).contains({1}));
  for (double v : {-1.0, -0.5, 0.0, 1.0}) CHECK(frechet_inequality(f, {0}, {v}));
  CHECK(!frechet_inequality(f, {0}, {1.2}));
}

TEST_CASE("subdifferential of the Euclidean norm at its center is the unit ball") {
  const CatalogFunction f = CatalogFunction::norm({0, 0});
  const auto s = f.subdifferential({0, 0});
  CHECK(s.kind() == SubdifferentialRep::Kind::Ball);
  CHECK(s.ball_radius() == doctest::Approx(1));
  CHECK(s.contains({0.6, 0.8}));
  CHECK(!s.contains({0.8, 0.8}));
  CHECK(frechet_inequality(f, {0, 0}, {0.6, -0.8}));
  CHECK(f.subdifferential({3, 4}).contains({0.6, 0.8}));
}

TEST_CASE("subdifferential of a max of smooth functions is the hull of active gradients") {
  const CatalogFunction f = CatalogFunction::max_of_smooth(
      1, {[](const Vector& x) { return x[0]; }, [](const Vector& x) { return -2 * x[0]; }},
      {[](const Vector&) { return Vector{1}; }, [](const Vector&) { return Vector{-2}; }});
  const auto s = f.subdifferential({0});
  CHECK(s.lo() == doctest::Approx(-2));
  CHECK(s.hi() == doctest::Approx(1));
  CHECK(frechet_inequality(f, {0}, {-2}));
  CHECK(frechet_inequality(f, {0}, {0.9}));
}

TEST_CASE("normal cone of a polyhedron and the indicator subdifferential") {
  const std::vector<Halfspace> quad{{{-1, 0}, 0}, {{0, -1}, 0}};  // x, y >= 0
  const auto n = normal_cone(quad, {0, 0});
  CHECK(n.contains({-1, -2}));
  CHECK(!n.contains({1, 0}));
  CHECK(normal_cone(quad, {1, 1}).contains({0, 0}));
  CHECK(!normal_cone(quad, {1, 1}).contains({0, -1}));
  CHECK_THROWS_AS(normal_cone(quad, {-1, 0}), NotOnGraph);
  const CatalogFunction ind = CatalogFunction::polyhedron_indicator(2, quad);
  CHECK(ind({-1, 0}) == kInf);
  CHECK(ind.subdifferential({-1, 0}).off_domain());
}

TEST_CASE("min norm uses the dual of the primal metric") {
  const auto s = SubdifferentialRep::singleton({3, 4});
  CHECK(s.min_norm(Metric()) == doctest::Approx(5));
  CHECK(s.min_norm(Metric::blocks({1, 1})) == doctest::Approx(4));
  CHECK(SubdifferentialRep::empty(1).min_norm(Metric()) == kInf);
  CHECK(SubdifferentialRep::interval(1, kInf).max_norm(Metric()) == kInf);
}

TEST_CASE("coderivative of the half-line graph") {
  // grph = {(x, y) : y >= 0}: normal cone at (0, 0) is {0} x (-inf, 0].
  const GraphRep g(1, 1, {GraphPiece{{GraphConstraint::affine({0, -1}, 0)}}});
  const auto c = coderivative_at(g, {0}, {0}, {1});
  CHECK(c.xstar.contains({0}));
  CHECK(c.xstar.max_norm(Metric()) == doctest::Approx(0));
  CHECK(coderivative_at(g, {0}, {0}, {-1}).xstar.is_empty());
  CHECK(outer_norm(g, {0}, {0}, Metric(), Metric()) == doctest::Approx(0));
  CHECK_THROWS_AS(coderivative_at(g, {0}, {-1}, {1}), NotOnGraph);
  // Graph of y = 2x: D*(y*) = {2 y*}.
  const GraphRep line(1, 1, {GraphPiece{{GraphConstraint::affine({2, -1}, 0), GraphConstraint::affine({-2, 1}, 0)}}});
  CHECK(coderivative_at(line, {0.5}, {1}, {1}).xstar.contains({2}));
  CHECK(min_coderivative_norm(line, {0}, {0}, Metric(), Metric()) == doctest::Approx(2));
}

TEST_CASE("c constant of the bilinear field is infinite") {
  const CatalogEntry e = catalog_entry("bilinear_field");
  const CConstant c = c_constant(*e.geneq, RadiusSchedule{});
  CHECK(c.value == kInf);
  const CatalogEntry a = catalog_entry("affine_tracking");
  CHECK_THROWS(c_constant(*a.geneq, RadiusSchedule{}));
}

TEST_CASE("strict outer subdifferential slope matches the strict outer slope on the catalog") {
  for (const auto& nf : function_catalog()) {
    CAPTURE(nf.id);
    const RadiusSchedule sch;
    const double a = strict_outer_subdif_slope(nf.fn, nf.reference, sch).value;
    const double b = strict_outer_slope(nf.fn.as_scalar_map(), nf.reference, sch).value;
    if (std::isinf(a) || std::isinf(b)) {
      CHECK(a == b);
    } else {
      CHECK(std::abs(a - b) <= 0.05);
    }
  }
}

TEST_CASE("sampled graph points lie on the graph") {
  const CatalogEntry e = catalog_entry("bilinear_field");
  const auto pts = sample_graph_points(*e.geneq, 0.1, RadiusSchedule{}, 0);
  CHECK(!pts.empty());
  for (const auto& [x, y] : pts) CHECK(e.geneq->reference_graph()->contains(x, y, 1e-7));
}

TEST_CASE("coderivative is positively homogeneous in y*") {
  // Polyhedral graph {(x, y) : y >= |x|} as two pieces sharing the origin.
  const GraphRep g(1, 1, {GraphPiece{{GraphConstraint::affine({1, -1}, 0), GraphConstraint::affine({-1, 0}, 0)}},
                          GraphPiece{{GraphConstraint::affine({-1, -1}, 0), GraphConstraint::affine({1, 0}, 0)}}});
  for (const Vector& pt : {Vector{0, 0}, Vector{0.5, 0.5}, Vector{-0.25, 1}}) {
    const auto base = coderivative_at(g, {pt[0]}, {pt[1]}, {1.0});
    for (double t : {0.5, 2.0, 10.0}) {
      const auto scaled = coderivative_at(g, {pt[0]}, {pt[1]}, {t});
      CHECK(scaled.xstar.is_empty() == base.xstar.is_empty());
      if (base.xstar.is_empty()) continue;
      CHECK(scaled.xstar.lo() == doctest::Approx(t * base.xstar.lo()));
      CHECK(scaled.xstar.hi() == doctest::Approx(t * base.xstar.hi()));
    }
  }
}
