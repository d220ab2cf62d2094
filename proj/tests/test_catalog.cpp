#include <doctest.h>

#include <cmath>

#include "varistab/catalog.hpp"
#include "varistab/errors.hpp"

using namespace varistab;

TEST_CASE("built-in list") {
  const std::vector<std::string> expect{"sqrt_epigraph",  "halfline_jump", "bilinear_field", "affine_tracking",
                                        "smooth_family", "quad_box",      "linear_halfline"};
  CHECK(builtin_ids() == expect);
  const auto all = catalog_ids();
  CHECK(all.size() > expect.size());
  CHECK(std::equal(expect.begin(), expect.end(), all.begin()));
  CHECK_THROWS_AS(catalog_entry("nope"), ContractViolation);
}

TEST_CASE("every entry is well formed") {
  for (const auto& id : catalog_ids()) {
    CAPTURE(id);
    const CatalogEntry e = catalog_entry(id);
    CHECK(e.id == id);
    CHECK(e.geneq.has_value() != e.opt.has_value());
    if (e.geneq) CHECK(displacement(*e.geneq, e.geneq->p_ref(), e.geneq->x_ref()) <= 1e-9);
  }
}

TEST_CASE("closed-form mappings agree with the displacement") {
  for (const auto& e : geneq_catalog()) {
    if (!e.mapping) continue;
    CAPTURE(e.id);
    const GenEqProblem& prob = *e.geneq;
    // Dyadic parameters stay on the grids of the grid-based instances.
    for (double t : {-0.25, -0.0625, 0.0, 0.0625, 0.25}) {
      const Vector p = axpy(prob.p_ref(), t, unit_vector(prob.dims().p, 0));
      if (!prob.p_region().contains(p)) continue;
      CAPTURE(t);
      const ClosedSet exact = e.mapping->value(p);
      // Exact points solve the equation: project grid points onto the set.
      for (const auto& x : grid_points(prob.x_region().lo, prob.x_region().hi, 1.0 / 16)) {
        if (exact.empty()) break;
        const Vector z = exact.project(x);
        if (prob.x_region().contains(z)) CHECK(displacement(prob, p, z) <= 1e-8);
      }
      // Exact grid solutions belong to the set.
      const auto sol = solve_on_grid(prob, p, prob.x_region(), 1.0 / 256, 1e-12);
      CHECK(excess(sol.points, exact) <= 1e-9);
    }
  }
}

TEST_CASE("function catalog references are finite") {
  const auto fns = function_catalog();
  CHECK(fns.size() >= 5);
  for (const auto& f : fns) {
    CAPTURE(f.id);
    CHECK(std::isfinite(f.fn(f.reference)));
  }
}

TEST_CASE("zero field graph") {
  const GraphRep g = zero_field_graph(2, 1);
  CHECK(g.contains({0.3, -4}, {0}));
  CHECK(!g.contains({0.3, -4}, {0.1}));
}

TEST_CASE("documented outcomes match the checks") {
  for (const auto& e : geneq_catalog()) {
    CAPTURE(e.id);
    if (e.expect_liplsc) CHECK(to_string(check_liplsc(*e.geneq, e.config).outcome) == std::string(to_string(*e.expect_liplsc)));
    if (e.expect_calm) CHECK(to_string(check_calm(*e.geneq, e.config).outcome) == std::string(to_string(*e.expect_calm)));
  }
}
