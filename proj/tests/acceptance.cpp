// Acceptance suite: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "varistab/catalog.hpp"
#include "varistab/errors.hpp"
#include "varistab/optstab.hpp"
#include "varistab/run.hpp"
#include "varistab/slopes.hpp"
#include "varistab/stability.hpp"

using namespace varistab;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome_ {
  bool pass = true;
  std::ostringstream notes;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      notes << " [failed: " << what << "]";
    }
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

// The geneq instances on which the Lipschitz-lsc sufficient condition holds.
const std::vector<std::string>& liplsc_instances() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> out;
    for (const auto& e : geneq_catalog()) {
      if (check_liplsc(*e.geneq, e.config).outcome == Outcome::Holds) out.push_back(e.id);
    }
    return out;
  }();
  return ids;
}

// ---------------------------------------------------------------- criteria

void criterion1(Outcome_& r) {
  const CatalogEntry e = catalog_entry("sqrt_epigraph");
  OracleGrid g = e.config.oracle_grid(*e.geneq);
  g.scales = e.config.p_scales;
  g.extra_points = {{0.01}};
  const EmpiricalEstimate est = empirical_modulus(*e.mapping, ModulusKind::LipLsc, g);
  r.require(est.diverging && est.value == kInf, "divergence flag");
  double worst = 0.0;
  bool saw_001 = false;
  for (const auto& q : est.quotients) {
    const double expect = std::pow(std::abs(q.p[0]), -0.5);
    worst = std::max(worst, std::abs(q.value - expect) / expect);
    if (near(q.p[0], 0.01, 1e-15)) {
      saw_001 = true;
      r.require(near(q.value, 10.0, 0.1), "quotient 10 at p = 0.01");
      r.notes << " q(0.01)=" << q.value;
    }
  }
  r.require(saw_001, "p = 0.01 evaluated");
  r.require(worst <= 0.01, "quotients within 1% of |p|^-1/2");
  r.notes << " max_rel_err=" << worst << " quotients=" << est.quotients.size();
}

void criterion2(Outcome_& r) {
  const CatalogEntry e = catalog_entry("halfline_jump");
  OracleGrid g = e.config.oracle_grid(*e.geneq);
  g.scales = e.config.p_scales;
  g.delta = 0.5;
  const EmpiricalEstimate calm = empirical_modulus(*e.mapping, ModulusKind::Calm, g);
  r.require(std::abs(calm.value) <= 1e-9, "calm modulus 0");
  const EmpiricalEstimate ul = empirical_modulus(*e.mapping, ModulusKind::UpperLipschitz, g);
  r.require(ul.diverging && ul.value == kInf, "upper Lipschitz flag");
  const EmpiricalEstimate au = empirical_modulus(*e.mapping, ModulusKind::Aubin, g);
  r.require(au.diverging && au.value == kInf, "Aubin flag");
  r.notes << " calm=" << calm.value << " upper_lipschitz=" << ul.value << " aubin=" << au.value;
}

void criterion3(Outcome_& r) {
  const CatalogEntry e = catalog_entry("bilinear_field");
  const GenEqProblem& prob = *e.geneq;
  const SlopeEstimate s =
      strict_outer_slope(graph_displacement_map(prob), concat(prob.x_ref(), prob.y_ref()), e.config.schedule);
  r.require(near(s.value, 1.0, 0.05), "strict outer slope 1");
  const CalmReport calm = check_calm(prob, e.config);
  r.require(calm.outcome == Outcome::Holds, "check_calm holds");
  r.require(calm.constants.l_f == 0.0, "l_f = 0");
  // l_F decreases to 0 along the scales.
  const auto& tr = calm.constants.F_trace;
  bool decreasing = !tr.empty();
  for (std::size_t k = 1; k < tr.size(); ++k) decreasing = decreasing && tr[k] <= tr[k - 1] + 1e-12;
  r.require(decreasing && tr.back() <= 1e-6, "l_F decreasing to 0");
  r.require(calm.bound && *calm.bound <= 1e-6, "bound -> 0");
  r.require(calm.oracle && calm.oracle->value == 0.0, "oracle modulus 0");
  const CoderivativeCalmReport cod = check_calm_coderivative(prob, e.config);
  r.require(cod.c.value == kInf, "c = +inf");
  OracleGrid g = e.config.oracle_grid(prob);
  g.scales = e.config.p_scales;
  const EmpiricalEstimate au = empirical_modulus(*e.mapping, ModulusKind::Aubin, g);
  r.require(au.diverging && au.value == kInf, "Aubin flag");
  r.notes << " slope=" << s.value << " bound=" << (calm.bound ? *calm.bound : NAN)
          << " oracle=" << (calm.oracle ? calm.oracle->value : NAN) << " c=" << cod.c.value;
}

void criterion4(Outcome_& r) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  int cases = 0;
  for (int trial = 0; trial < 24; ++trial) {
    const std::size_t n = 1 + trial % 3;
    Matrix a(n, Vector(n));
    Vector b(n), x(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j <= i; ++j) a[i][j] = a[j][i] = u(rng);
      b[i] = u(rng);
      x[i] = u(rng);
    }
    auto grad = [a, b](const Vector& z) {
      Vector gr = b;
      for (std::size_t i = 0; i < gr.size(); ++i) {
        for (std::size_t j = 0; j < gr.size(); ++j) gr[i] += a[i][j] * z[j];
      }
      return gr;
    };
    const ScalarMap g{[a, b](const Vector& z) {
                        double v = 0.0;
                        for (std::size_t i = 0; i < z.size(); ++i) {
                          v += b[i] * z[i];
                          for (std::size_t j = 0; j < z.size(); ++j) v += 0.5 * a[i][j] * z[i] * z[j];
                        }
                        return v;
                      },
                      Metric(), n, {}};
    const double gn = euclidean_norm(grad(x));
    const double est = strong_slope(g, x, RadiusSchedule{}).value;
    const double err = std::abs(est - gn);
    worst = std::max(worst, err / std::max(1.0, gn));
    r.require(err <= std::max(1e-2, 1e-2 * gn), "strong slope vs gradient norm");
    ++cases;

    // Jacobian of the quadratic map x -> A x + (x_1^2, ..).
    const BaseFn f(
        {1, n, n},
        [a](const Vector& p, const Vector& z) {
          Vector v(z.size());
          for (std::size_t i = 0; i < z.size(); ++i) {
            v[i] = z[i] * z[i] - p[0];
            for (std::size_t j = 0; j < z.size(); ++j) v[i] += a[i][j] * z[j];
          }
          return v;
        },
        [a](const Vector&, const Vector& z) {
          Matrix j = a;
          for (std::size_t i = 0; i < z.size(); ++i) j[i][i] += 2.0 * z[i];
          return j;
        });
    Vector v(n);
    for (auto& t : v) t = u(rng);
    r.require(jacobian_fd_error(f, {0.1}, x, v) <= 1e-4, "quadratic map Jacobian");
  }
  int jac = 0;
  for (const auto& e : geneq_catalog()) {
    if (!e.geneq->base().has_jacobian()) continue;
    for (double t : {-0.3, 0.0, 0.2}) {
      Vector x = e.geneq->x_ref();
      for (auto& c : x) c += t;
      const Vector d = unit_vector(e.geneq->dims().x, 0);
      r.require(jacobian_fd_error(e.geneq->base(), e.geneq->p_ref(), x, d) <= 1e-4, "catalog Jacobian " + e.id);
      ++jac;
    }
  }
  r.require(cases >= 20, "at least 20 quadratics");
  r.notes << " quadratics=" << cases << " worst_rel=" << worst << " jacobian_checks=" << jac + cases;
}

ScalarMap sum_map(const CatalogFunction& f, const CatalogFunction& g) {
  const ScalarMap a = f.as_scalar_map(), b = g.as_scalar_map();
  ScalarMap s{[a, b](const Vector& x) { return a(x) + b(x); }, a.metric, a.dim, {}};
  if (a.retract || b.retract) {
    s.retract = [a, b](const Vector& x) {
      Vector z = a.retract ? a.retract(x) : x;
      return b.retract ? b.retract(z) : z;
    };
  }
  return s;
}

void criterion5(Outcome_& r) {
  const auto fns = function_catalog();
  auto by_id = [&](const std::string& id) -> const CatalogFunction& {
    for (const auto& f : fns) {
      if (f.id == id) return f.fn;
    }
    throw std::runtime_error("unknown function " + id);
  };
  const std::vector<std::pair<std::string, std::string>> pairs = {
      {"abs", "max_line_pair"},          {"abs", "halfline_indicator"}, {"max_line_pair", "halfline_indicator"},
      {"abs", "abs_on_halfline"},        {"max_line_pair", "abs_on_halfline"},
      {"halfline_indicator", "abs_on_halfline"}, {"quadratic_2d", "norm_2d"}};
  const RadiusSchedule sch;
  int checked = 0;
  double worst = -kInf;
  for (const auto& [fa, fb] : pairs) {
    const CatalogFunction& f = by_id(fa);
    const CatalogFunction& g = by_id(fb);
    const std::vector<Vector> pts = f.dim() == 1 ? std::vector<Vector>{{0.0}, {0.25}, {0.5}, {1.0}}
                                                 : std::vector<Vector>{{0.0, 0.0}, {0.3, -0.2}, {-0.5, 0.1}};
    for (const auto& x : pts) {
      if (!std::isfinite(f(x)) || !std::isfinite(g(x))) continue;
      const double lhs = strong_slope(sum_map(f, g), x, sch).value;
      const double rhs = strong_slope(f.as_scalar_map(), x, sch).value + strong_slope(g.as_scalar_map(), x, sch).value;
      worst = std::max(worst, lhs - rhs);
      r.require(lhs <= rhs + 0.05, "slope sum inequality " + fa + "+" + fb);
    }
    ++checked;
  }
  r.require(checked >= 5, "at least 5 pairs");
  double worst_eq = 0.0;
  for (const auto& nf : fns) {
    const double a = strict_outer_subdif_slope(nf.fn, nf.reference, sch).value;
    const double b = strict_outer_slope(nf.fn.as_scalar_map(), nf.reference, sch).value;
    const bool ok = (std::isinf(a) && std::isinf(b)) || std::abs(a - b) <= 0.05;
    if (std::isfinite(a) && std::isfinite(b)) worst_eq = std::max(worst_eq, std::abs(a - b));
    r.require(ok, "slope equality " + nf.id);
  }
  r.notes << " pairs=" << checked << " max(lhs-rhs)=" << worst << " functions=" << fns.size()
          << " max|outer-subdif|=" << worst_eq;
}

void criterion6(Outcome_& r) {
  int n = 0;
  for (const auto& id : liplsc_instances()) {
    const CatalogEntry e = catalog_entry(id);
    const LiplscReport rep = check_liplsc(*e.geneq, e.config);
    const double bound = (rep.constants.l_f + rep.constants.l_F) / rep.slope.value;
    r.require(rep.bound && near(*rep.bound, bound, 1e-12), id + " bound");
    r.require(rep.oracle && rep.oracle->value <= bound * 1.05 + e.config.x_step, id + " oracle within bound");
    if (id == "affine_tracking") r.require(near(bound, 1.0, 1e-3), "affine_tracking bound 1");
    if (id == "linear_halfline_argmin") r.require(near(bound, 1.5, 1e-3), "argmin instance bound 1.5");
    r.notes << " " << id << ":" << (rep.oracle ? rep.oracle->value : NAN) << "<=" << bound;
    ++n;
  }
  r.require(n >= 5, "at least 5 instances");
}

void criterion7(Outcome_& r) {
  int n = 0;
  for (const auto& id : liplsc_instances()) {
    const CatalogEntry e = catalog_entry(id);
    const CalmReport rep = check_calm(*e.geneq, e.config);
    if (rep.outcome != Outcome::Holds || !rep.bound) {
      r.notes << " " << id << ":no-bound(" << to_string(rep.outcome) << ")";
      continue;
    }
    const double bound = (rep.constants.l_f + rep.constants.l_F) / rep.slope.value;
    r.require(near(*rep.bound, bound, 1e-12), id + " bound");
    r.require(rep.oracle && rep.oracle->value <= bound * 1.05 + e.config.x_step, id + " oracle within bound");
    r.notes << " " << id << ":" << (rep.oracle ? rep.oracle->value : NAN) << "<=" << bound;
    ++n;
  }
  r.require(n >= 5, "at least 5 instances with a calmness bound");
}

void criterion8(Outcome_& r) {
  int runs = 0;
  for (const auto& id : liplsc_instances()) {
    const CatalogEntry e = catalog_entry(id);
    const GenEqProblem& prob = *e.geneq;
    const PerturbationConstants k = estimate_perturbation_constants(prob, ConstantsMode::Pointwise, e.config);
    TrackerConfig tc;
    tc.lf_plus_lF = k.l_f + k.l_F;
    const auto params = default_track_params(prob, default_track_radius(prob, e.config));
    r.require(params.size() == 8, id + " has 8 parameters");
    for (const auto& p : params) {
      try {
        const TrackerResult t = ekeland_track(prob, p, tc);
        r.require(t.psi <= 1e-8, id + " psi");
        r.require(t.distance_ok, id + " distance bound");
        // Independent residual check.
        r.require(displacement(prob, p, t.x) <= 1e-8, id + " residual");
      } catch (const NoSolutionFound& ex) {
        r.require(false, id + " tracker: " + ex.what());
      }
      ++runs;
    }
  }
  r.notes << " instances=" << liplsc_instances().size() << " runs=" << runs;
}

void criterion9(Outcome_& r) {
  int checked = 0, holding = 0;
  for (const auto& e : opt_catalog()) {
    for (ValueProp w : {ValueProp::P1, ValueProp::P2, ValueProp::P3, ValueProp::P4}) {
      const PropReport rep = check_value_function_props(*e.opt, w, e.config);
      ++checked;
      if (!rep.hypotheses_hold) continue;
      ++holding;
      r.require(rep.conclusion.status != Status::Fails && !rep.bug,
                e.id + " " + to_string(w) + " conclusion");
      if (w == ValueProp::P3) {
        r.require(rep.quantitative_bound && rep.quantitative_value, e.id + " P3 quantities");
        if (rep.quantitative_bound && rep.quantitative_value) {
          r.require(*rep.quantitative_value >= *rep.quantitative_bound - 0.05, e.id + " P3 constant");
          r.notes << " " << e.id << ":P3 " << *rep.quantitative_value << ">=" << *rep.quantitative_bound;
        }
      }
    }
  }
  r.notes << " checks=" << checked << " hypotheses_hold=" << holding;
}

void criterion10(Outcome_& r) {
  const CatalogEntry lh = catalog_entry("linear_halfline");
  const ArgminReport a = check_argmin_liplsc(*lh.opt, ArgminVariant::Slope, lh.config);
  r.require(a.outcome == Outcome::Holds, "linear_halfline holds");
  r.require(near(a.slope, 2.0, 1e-3) && near(lh.opt->kappa_sampled(), 1.0, 1e-9) && a.slope > a.kappa,
            "slope 2 > kappa 1");
  r.require(a.liplsc && a.liplsc->bound && near(*a.liplsc->bound, 1.5, 1e-3), "bound 1.5");
  r.require(a.oracle && near(a.oracle->value, 1.0, 1e-2) && a.oracle->value <= 1.5, "oracle 1 <= 1.5");
  r.require(a.argmin_matches, "G = Argmin on the grid");
  const CatalogEntry flat = catalog_entry("linear_flat");
  const ArgminReport f = check_argmin_liplsc(*flat.opt, ArgminVariant::Slope, flat.config);
  bool v_fails = false;
  for (const auto& h : f.hypotheses) v_fails = v_fails || (h.id == "v" && h.status == Status::Fails);
  r.require(f.outcome == Outcome::Fails && v_fails && !f.liplsc, "phi = x fails (v)");
  r.notes << " slope=" << a.slope << " kappa=" << lh.opt->kappa_sampled() << " (used " << a.kappa << ")"
          << " bound=" << (a.liplsc && a.liplsc->bound ? *a.liplsc->bound : NAN)
          << " oracle=" << (a.oracle ? a.oracle->value : NAN) << " flat_slope=" << f.slope;
}

// Every command on every listed instance, plus the optimization checks.
std::vector<std::string> full_suite_reports(std::uint64_t seed) {
  std::vector<nlohmann::json> configs;
  configs.push_back({{"schema", 1}, {"command", "catalog"}});
  for (const auto& id : builtin_ids()) {
    const CatalogEntry e = catalog_entry(id);
    if (e.geneq) {
      for (const char* c : {"slope", "check-liplsc", "check-calm", "track", "empirical"}) {
        configs.push_back({{"schema", 1}, {"command", c}, {"instance", id}});
      }
      if (e.geneq->base().is_null()) {
        configs.push_back({{"schema", 1}, {"command", "check-calm-coderivative"}, {"instance", id}});
      } else if (e.geneq->base().has_jacobian() && e.geneq->reference_graph()) {
        configs.push_back({{"schema", 1}, {"command", "check-calm-smooth"}, {"instance", id}});
      }
    } else {
      configs.push_back({{"schema", 1}, {"command", "optstab"}, {"instance", id}});
    }
  }
  std::vector<std::string> out;
  for (auto& c : configs) {
    c["seed"] = seed;
    out.push_back(run_config(c).json.dump());
  }
  return out;
}

void criterion11(Outcome_& r) {
  const auto a = full_suite_reports(7);
  const auto b = full_suite_reports(7);
  r.require(a.size() == b.size(), "same report count");
  std::size_t diff = 0;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) diff += a[i] != b[i];
  r.require(diff == 0, "byte-identical reports");
  r.notes << " reports=" << a.size() << " differing=" << diff;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    void (*run)(Outcome_&);
    double limit;  // seconds, 0 = no individual limit
  };
  const std::vector<Criterion> criteria = {
      {1, criterion1, 1.0},  {2, criterion2, 1.0}, {3, criterion3, 10.0}, {4, criterion4, 0.0},
      {5, criterion5, 0.0},  {6, criterion6, 30.0}, {7, criterion7, 0.0}, {8, criterion8, 0.0},
      {9, criterion9, 0.0},  {10, criterion10, 0.0}, {11, criterion11, 0.0}};
  const auto t_all = Clock::now();
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome_ r;
    const auto t0 = Clock::now();
    try {
      c.run(r);
    } catch (const std::exception& e) {
      r.require(false, std::string("exception: ") + e.what());
    }
    const double dt = seconds_since(t0);
    if (c.limit > 0.0) r.require(dt < c.limit, "runtime under " + std::to_string(c.limit) + " s");
    if (c.id == 11) {
      const double total = seconds_since(t_all);
      r.require(total < 120.0, "full suite under 120 s");
      r.notes << " suite_total=" << total << "s";
    }
    std::printf("criterion %d: %s (%.3fs)%s\n", c.id, r.pass ? "PASS" : "FAIL", dt, r.notes.str().c_str());
    std::fflush(stdout);
    failed += !r.pass;
  }
  return failed == 0 ? 0 : 1;
}
