#include <doctest.h>

#include <cmath>

#include "varistab/catalog.hpp"
#include "varistab/errors.hpp"
#include "varistab/optstab.hpp"

using namespace varistab;

namespace {

const ParamOptProblem& opt(const std::string& id) {
  static std::map<std::string, CatalogEntry> cache;
  auto it = cache.find(id);
  if (it == cache.end()) it = cache.emplace(id, catalog_entry(id)).first;
  return *it->second.opt;
}

CheckConfig config_of(const std::string& id) { return catalog_entry(id).config; }

// Brute-force grid value: loops over the grid directly.
double brute_value(const ParamOptProblem& prob, const Vector& p) {
  const auto& s = prob.spec();
  double best = kInf;
  for (double x = s.x_region.lo[0]; x <= s.x_region.hi[0] + 1e-12; x += s.x_step) {
    if (s.C.contains(s.constraint(p, {x}), s.tol_feas)) best = std::min(best, s.objective(p, {x}));
  }
  return best;
}

}  // namespace

TEST_CASE("value function matches the brute-force grid minimum") {
  for (const char* id : {"quad_box", "linear_halfline", "linear_flat"}) {
    CAPTURE(id);
    const auto& prob = opt(id);
    for (double p : {-0.5, -0.25, 0.0, 0.125, 0.3, 0.5}) {
      CHECK(value_function(prob, {p}).value == doctest::Approx(brute_value(prob, {p})));
    }
  }
  // valf(p) = max(p, 0)^2 and 2p, up to grid rounding.
  CHECK(value_function(opt("quad_box"), {-0.25}).value == doctest::Approx(0.0));
  CHECK(value_function(opt("quad_box"), {0.25}).value == doctest::Approx(0.0625));
  CHECK(value_function(opt("linear_halfline"), {-0.25}).value == doctest::Approx(-0.5));
}

TEST_CASE("argmin is sorted and the reference value is attained") {
  const auto r = value_function(opt("linear_halfline"), {0.25});
  REQUIRE(r.argmin.size() == 1);
  CHECK(r.argmin[0][0] == doctest::Approx(0.25));
  for (const auto& e : opt_catalog()) {
    CAPTURE(e.id);
    const auto& s = e.opt->spec();
    CHECK(e.opt->value(s.p_ref).value == doctest::Approx(s.objective(s.p_ref, s.x_ref)).epsilon(1e-9));
  }
}

TEST_CASE("local value function") {
  ValueScope scope{true, {0.0}, 0.1};
  const auto r = value_function(opt("linear_halfline"), {-0.25}, scope);
  CHECK(r.value == doctest::Approx(-0.2).epsilon(1e-2));
}

TEST_CASE("kappa is the inflated sampled Lipschitz constant of h") {
  const auto& prob = opt("linear_halfline");
  CHECK(prob.kappa_sampled() == doctest::Approx(1.0));
  CHECK(prob.kappa() == doctest::Approx(1.1));
}

TEST_CASE("scalar calmness") {
  ScalarCalmConfig cfg;
  const auto lin = scalar_calmness([](const Vector& p) { return 2 * p[0]; }, {0}, Side::Both, cfg);
  CHECK(lin.holds);
  CHECK(lin.upper == doctest::Approx(2.0));
  CHECK(lin.lower == doctest::Approx(-2.0));
  const auto root = scalar_calmness([](const Vector& p) { return -std::sqrt(std::abs(p[0])); }, {0}, Side::Below, cfg);
  CHECK(!root.holds);
  CHECK(root.lower == -kInf);
  CHECK(scalar_calmness([](const Vector& p) { return -std::sqrt(std::abs(p[0])); }, {0}, Side::Above, cfg).holds);
  CHECK_THROWS_AS(scalar_calmness([](const Vector&) { return kInf; }, {0}, Side::Both, cfg), DomainError);
}

TEST_CASE("problem calmness examples") {
  const auto q = problem_calmness(opt("quad_box"), 0.5, config_of("quad_box"));
  CHECK(q.calm);
  CHECK(q.inf_quotient >= -1e-9);
  const auto l = problem_calmness(opt("linear_halfline"), 0.5, config_of("linear_halfline"));
  CHECK(l.calm);
  CHECK(l.inf_quotient == doctest::Approx(-2.0).epsilon(1e-2));
  const auto s = problem_calmness(opt("sqrt_objective"), 0.5, config_of("sqrt_objective"));
  CHECK(!s.calm);
}

TEST_CASE("value function propositions") {
  const auto p2 = check_value_function_props(opt("quad_box"), ValueProp::P2, config_of("quad_box"));
  CHECK(p2.hypotheses_hold);
  CHECK(p2.outcome == Outcome::Holds);
  const auto p1 = check_value_function_props(opt("quad_box"), ValueProp::P1, config_of("quad_box"));
  CHECK(p1.outcome == Outcome::Holds);
  const auto p3 = check_value_function_props(opt("linear_halfline"), ValueProp::P3, config_of("linear_halfline"));
  CHECK(p3.hypotheses_hold);
  REQUIRE(p3.quantitative_bound);
  REQUIRE(p3.quantitative_value);
  CHECK(*p3.quantitative_bound == doctest::Approx(-6.0).epsilon(1e-2));
  CHECK(*p3.quantitative_value == doctest::Approx(-2.0).epsilon(1e-2));
  CHECK(p3.quantitative_ok);
  for (const auto& e : opt_catalog()) {
    for (ValueProp w : {ValueProp::P1, ValueProp::P2, ValueProp::P3, ValueProp::P4}) {
      CAPTURE(e.id);
      CAPTURE(to_string(w));
      CHECK(!check_value_function_props(*e.opt, w, e.config).bug);
    }
  }
}

TEST_CASE("argmin generalized equation reproduces Argmin on the grid") {
  const auto& prob = opt("linear_halfline");
  const GenEqProblem ge = argmin_generalized_equation(prob);
  CHECK(ge.dims().y == 2);
  for (double p : {-0.25, 0.0, 0.375}) {
    const auto sol = solve_on_grid(ge, {p}, ge.x_region(), prob.spec().x_step, 1e-12);
    CHECK(sol.points == prob.value({p}).argmin);
  }
}

TEST_CASE("argmin Lipschitz lsc") {
  const auto& lh = opt("linear_halfline");
  const CheckConfig cfg = config_of("linear_halfline");
  const ArgminReport r = check_argmin_liplsc(lh, ArgminVariant::Slope, cfg);
  CHECK(r.outcome == Outcome::Holds);
  CHECK(r.slope == doctest::Approx(2.0).epsilon(1e-3));
  REQUIRE(r.liplsc);
  REQUIRE(r.liplsc->bound);
  CHECK(*r.liplsc->bound == doctest::Approx(1.5).epsilon(1e-3));
  REQUIRE(r.oracle);
  CHECK(r.oracle->value == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(r.argmin_matches);

  const ArgminReport s = check_argmin_liplsc(lh, ArgminVariant::Smooth, cfg);
  CHECK(s.outcome == Outcome::Holds);

  const ArgminReport f = check_argmin_liplsc(opt("linear_flat"), ArgminVariant::Slope, config_of("linear_flat"));
  CHECK(f.outcome == Outcome::Fails);
  bool v_failed = false;
  for (const auto& h : f.hypotheses) v_failed = v_failed || (h.id == "v" && h.status == Status::Fails);
  CHECK(v_failed);
  CHECK(!f.liplsc);
}
