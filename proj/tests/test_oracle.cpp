#include <doctest.h>

#include <cmath>

#include "varistab/catalog.hpp"
#include "varistab/oracle.hpp"

using namespace varistab;

namespace {

SetValuedMap map_of(std::function<ClosedSet(const Vector&)> f, Region xr) {
  SetValuedMap m;
  m.value = std::move(f);
  m.x_region = std::move(xr);
  m.x_step = 1.0 / 1024;
  return m;
}

OracleGrid grid_at_zero() {
  OracleGrid g;
  g.p_ref = {0};
  g.x_ref = {0};
  return g;
}

}  // namespace

TEST_CASE("oracle radii shrink by the ratio") {
  const OracleGrid g = grid_at_zero();
  const auto r = g.radii();
  CHECK(r.size() == 8);
  CHECK(r[0] == doctest::Approx(0.5));
  CHECK(r[1] == doctest::Approx(0.125));
}

TEST_CASE("divergence rule") {
  CHECK(diverging_trace({1, 2, 4, 8, 16}));
  CHECK(!diverging_trace({1, 2, 4, 8, 10}));
  CHECK(!diverging_trace({1, 1, 1, 1, 1}));
  CHECK(!diverging_trace({1, 2, 4}));
}

TEST_CASE("Lipschitz map: all moduli equal the slope") {
  // Phi(p) = {3p}: every modulus is 3.
  const auto m = map_of([](const Vector& p) { return ClosedSet::singleton({3 * p[0]}); }, {{-2}, {2}});
  for (ModulusKind k : {ModulusKind::LipLsc, ModulusKind::Calm, ModulusKind::UpperLipschitz, ModulusKind::Aubin}) {
    CAPTURE(to_string(k));
    const auto e = empirical_modulus(m, k, grid_at_zero());
    CHECK(!e.diverging);
    CHECK(e.value == doctest::Approx(3.0).epsilon(1e-3));
  }
}

TEST_CASE("square-root map diverges and its quotients follow |p|^(-1/2)") {
  const auto m = map_of([](const Vector& p) { return ClosedSet::singleton({std::sqrt(std::abs(p[0]))}); }, {{-1}, {2}});
  OracleGrid g = grid_at_zero();
  g.extra_points = {{0.01}};
  const auto e = empirical_modulus(m, ModulusKind::LipLsc, g);
  CHECK(e.diverging);
  CHECK(e.value == kInf);
  for (const auto& q : e.quotients) {
    const double expect = 1.0 / std::sqrt(std::abs(q.p[0]));
    CHECK(q.value == doctest::Approx(expect).epsilon(0.01));
  }
}

TEST_CASE("verdict comparison threshold") {
  EmpiricalEstimate e;
  e.value = 1.06;
  const Verdict v = verdict_compare(1.0, e, 0.05, 0.01);
  CHECK(v.threshold == doctest::Approx(1.06));
  CHECK(v.pass);
  e.value = 1.07;
  CHECK(!verdict_compare(1.0, e, 0.05, 0.01).pass);
}

TEST_CASE("solution map from a generalized equation") {
  const CatalogEntry e = catalog_entry("shifted_halfline");
  const SetValuedMap m = solution_map(*e.geneq, 1.0 / 256, 1.0 / 256);
  const ClosedSet s = m.value({0.25});
  // Points within the acceptance threshold of the boundary count as solutions.
  CHECK(s.distance({0.0}) >= 0.25 - 2.0 / 256);
  CHECK(s.distance({0.0}) <= 0.25);
  CHECK(s.distance({1.0}) == 0.0);
}

TEST_CASE("oracle invariants on nested grids") {
  for (const char* id : {"affine_tracking", "halfline_jump", "shifted_halfline", "smooth_family"}) {
    CAPTURE(id);
    const CatalogEntry e = catalog_entry(id);
    OracleGrid coarse = e.config.oracle_grid(*e.geneq);
    coarse.scales = 5;
    OracleGrid fine = coarse;
    fine.scales = 7;
    fine.extra_dirs = 4;
    for (ModulusKind k : {ModulusKind::LipLsc, ModulusKind::Calm, ModulusKind::UpperLipschitz, ModulusKind::Aubin}) {
      CAPTURE(to_string(k));
      CHECK(empirical_modulus(*e.mapping, k, fine).value >= empirical_modulus(*e.mapping, k, coarse).value);
    }
    // Calm with a delta covering the region equals upper Lipschitz.
    OracleGrid wide = coarse;
    wide.delta = 1e3;
    CHECK(empirical_modulus(*e.mapping, ModulusKind::Calm, wide).value ==
          empirical_modulus(*e.mapping, ModulusKind::UpperLipschitz, wide).value);
    CHECK(empirical_modulus(*e.mapping, ModulusKind::Aubin, coarse).value >=
          empirical_modulus(*e.mapping, ModulusKind::Calm, coarse).value);
  }
}
