#include <doctest.h>

#include <cmath>

#include "varistab/catalog.hpp"
#include "varistab/errors.hpp"
#include "varistab/stability.hpp"

using namespace varistab;

namespace {

const HypothesisStatus& status(const std::vector<HypothesisStatus>& v, const std::string& id) {
  for (const auto& h : v) {
    if (h.id == id) return h;
  }
  FAIL("missing hypothesis " << id);
  return v.front();
}

}  // namespace

TEST_CASE("sqrt_epigraph fails the Lipschitz condition on the field") {
  const CatalogEntry e = catalog_entry("sqrt_epigraph");
  const LiplscReport r = check_liplsc(*e.geneq, e.config);
  CHECK(r.outcome == Outcome::Fails);
  CHECK(status(r.statuses, "iii").status == Status::Fails);
  CHECK(!r.bound);
}

TEST_CASE("affine_tracking: Lipschitz lsc with bound 1, validated by the oracle") {
  const CatalogEntry e = catalog_entry("affine_tracking");
  const LiplscReport r = check_liplsc(*e.geneq, e.config);
  CHECK(r.outcome == Outcome::Holds);
  REQUIRE(r.bound);
  CHECK(*r.bound == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(r.validation_pass);
  REQUIRE(r.verdict);
  CHECK(r.verdict->pass);
}

TEST_CASE("perturbation constants of affine_tracking") {
  const CatalogEntry e = catalog_entry("affine_tracking");
  const auto k = estimate_perturbation_constants(*e.geneq, ConstantsMode::Uniform, e.config);
  CHECK(k.l_f == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(k.l_F == doctest::Approx(0.0));
  CHECK(!k.f_diverging);
}

TEST_CASE("bilinear_field: calm with bound 0") {
  const CatalogEntry e = catalog_entry("bilinear_field");
  const CalmReport r = check_calm(*e.geneq, e.config);
  CHECK(r.outcome == Outcome::Holds);
  CHECK(r.slope.value == doctest::Approx(1.0).epsilon(0.05));
  REQUIRE(r.bound);
  CHECK(*r.bound == doctest::Approx(0.0));
  REQUIRE(r.oracle);
  CHECK(r.oracle->value == doctest::Approx(0.0));
  const CoderivativeCalmReport c = check_calm_coderivative(*e.geneq, e.config);
  CHECK(c.calm);
  CHECK(c.c.value == kInf);
}

TEST_CASE("quadratic_fold: zero strict outer slope fails hypothesis (vi)") {
  const CatalogEntry e = catalog_entry("quadratic_fold");
  const CalmReport r = check_calm(*e.geneq, e.config);
  CHECK(status(r.statuses, "vi").status == Status::Fails);
  CHECK(r.outcome != Outcome::Holds);
}

TEST_CASE("calmness with a smooth base") {
  const CatalogEntry e = catalog_entry("smooth_family");
  const SmoothBaseReport r = check_calm_smooth_base(*e.geneq, 0.5, e.config);
  CHECK(r.holds);
  CHECK(r.outcome == Outcome::Holds);
  const CatalogEntry b = catalog_entry("bilinear_field");
  // The null base has a zero Jacobian, so the inequality cannot hold.
  CHECK(check_calm_smooth_base(*b.geneq, 0.5, b.config).outcome != Outcome::Holds);
  CHECK_THROWS_AS(check_calm_smooth_base(*e.geneq, 0.0, e.config), ContractViolation);
}

TEST_CASE("Ekeland tracker on affine_tracking") {
  const CatalogEntry e = catalog_entry("affine_tracking");
  TrackerConfig tc;
  tc.lf_plus_lF = 1.0;
  for (double p : {-0.4, -0.1, 0.2, 0.4}) {
    const TrackerResult r = ekeland_track(*e.geneq, {p}, tc);
    CHECK(r.psi <= 1e-8);
    CHECK(r.x[0] == doctest::Approx(p).epsilon(1e-6));
    REQUIRE(r.distance_bound);
    CHECK(r.distance_ok);
    CHECK(!r.trace.empty());
  }
}

TEST_CASE("tracker reports a missing solution") {
  const CatalogEntry e = catalog_entry("quadratic_fold");
  CHECK_THROWS_AS(ekeland_track(*e.geneq, {-0.25}, TrackerConfig{}), NoSolutionFound);
}

TEST_CASE("graph displacement map is finite on the graph") {
  const CatalogEntry e = catalog_entry("shifted_halfline");
  const ScalarMap g = graph_displacement_map(*e.geneq);
  CHECK(g({0.5, 0.5}) == doctest::Approx(0.0));
  CHECK(g({0.5, -0.5}) == kInf);
}
