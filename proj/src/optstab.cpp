#include "varistab/optstab.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "varistab/errors.hpp"
#include "varistab/sampling.hpp"
#include "varistab/slopes.hpp"

namespace varistab {

namespace {

constexpr std::size_t kCacheCapacity = 1u << 15;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// Per-scale parameter points p_ref + r_k d with r_k >= 8 * step.
struct Scales {
  std::vector<double> radii;
  std::vector<std::vector<Vector>> points;
};

Scales parameter_scales(const Vector& pbar, const Metric& pm, std::size_t dim, double r0, double ratio, int scales,
                        std::size_t extra, std::uint64_t seed, double step) {
  Scales s;
  const auto dirs = unit_directions(pm, dim, extra, seed);
  double r = r0;
  for (int k = 0; k < scales && r >= 8.0 * step; ++k, r *= ratio) {
    s.radii.push_back(r);
    std::vector<Vector> pts;
    for (const auto& d : dirs) pts.push_back(axpy(pbar, r, d));
    s.points.push_back(std::move(pts));
  }
  return s;
}

ScalarCalmConfig scalar_config(const ParamOptProblem& prob, const CheckConfig& cfg) {
  ScalarCalmConfig sc;
  sc.r0 = cfg.p_r0;
  sc.ratio = cfg.p_ratio;
  sc.extra_dirs = cfg.p_extra_dirs;
  sc.seed = cfg.seed;
  sc.metric = prob.spec().p_metric;
  int n = 0;
  for (double r = cfg.p_r0; n < cfg.p_scales && r >= 8.0 * prob.spec().x_step; r *= cfg.p_ratio) ++n;
  sc.scales = std::max(n, 1);
  return sc;
}

// Sampled Lipschitz quotients of phi on P x X (sum metric) around the center:
// per scale h, pairs (z, z + h d) for z on a coarse window and unit d.
struct LipschitzTrace {
  double value = 0.0;
  bool diverging = false;
  std::vector<double> trace;
  Vector witness;
};

LipschitzTrace phi_lipschitz(const ParamOptProblem& prob, const Vector& pc, const Vector& xc, double window) {
  const auto& s = prob.spec();
  const Metric zm = Metric::product(s.p_metric, s.p_dim, s.x_metric, s.x_dim);
  const std::size_t nz = s.p_dim + s.x_dim;
  const Vector zc = concat(pc, xc);
  std::vector<Vector> base{zc};
  for (const auto& g : grid_points(Vector(nz, -1.0), Vector(nz, 1.0), 0.5)) base.push_back(axpy(zc, window, g));
  const auto dirs = unit_directions(zm, nz, 8, 17);
  LipschitzTrace lt;
  double h = 0.25;
  for (int k = 0; k < 8; ++k, h *= 0.25) {
    double best = 0.0;
    for (const auto& z : base) {
      const double f0 = s.objective(slice(z, 0, s.p_dim), slice(z, s.p_dim, s.x_dim));
      for (const auto& d : dirs) {
        const Vector w = axpy(z, h, d);
        const double f1 = s.objective(slice(w, 0, s.p_dim), slice(w, s.p_dim, s.x_dim));
        const double q = std::abs(f1 - f0) / zm.distance(w, z);
        if (q > best) {
          best = q;
          if (q > lt.value) {
            lt.value = q;
            lt.witness = concat(z, w);
          }
        }
      }
    }
    lt.trace.push_back(best);
  }
  lt.diverging = diverging_trace(lt.trace);
  if (lt.diverging) lt.value = kInf;
  return lt;
}

SetValuedMap feasible_map(const ParamOptProblem& prob) {
  SetValuedMap m;
  m.value = [prob](const Vector& p) {
    std::vector<Vector> pts;
    for (const auto& x : prob.x_grid()) {
      if (prob.feasible(p, x)) pts.push_back(x);
    }
    return ClosedSet::cloud(std::move(pts), prob.spec().x_dim);
  };
  m.p_dim = prob.spec().p_dim;
  m.x_dim = prob.spec().x_dim;
  m.p_metric = prob.spec().p_metric;
  m.x_metric = prob.spec().x_metric;
  m.x_region = prob.spec().x_region;
  m.x_step = prob.spec().x_step;
  return m;
}

SetValuedMap argmin_map(const ParamOptProblem& prob) {
  SetValuedMap m = feasible_map(prob);
  m.value = [prob](const Vector& p) { return ClosedSet::cloud(prob.value(p).argmin, prob.spec().x_dim); };
  return m;
}

OracleGrid opt_oracle_grid(const ParamOptProblem& prob, const CheckConfig& cfg) {
  OracleGrid g;
  g.p_ref = prob.spec().p_ref;
  g.x_ref = prob.spec().x_ref;
  g.r0 = cfg.p_r0;
  g.ratio = cfg.p_ratio;
  g.extra_dirs = cfg.p_extra_dirs;
  g.seed = cfg.seed;
  g.delta = cfg.calm_delta;
  g.scales = scalar_config(prob, cfg).scales;
  return g;
}

HypothesisStatus modulus_status(const char* id, const char* name, const EmpiricalEstimate& e) {
  HypothesisStatus h{id, Status::Holds, "", concat(e.witness.p, e.witness.x), e.value};
  if (!std::isfinite(e.value)) {
    h.status = Status::Fails;
    h.detail = std::string(name) + (e.diverging ? " quotients diverge" : " is infinite");
  } else {
    h.detail = std::string(name) + " constant = " + fmt(e.value);
  }
  return h;
}

HypothesisStatus lipschitz_status(const char* id, const char* name, const LipschitzTrace& lt) {
  HypothesisStatus h{id, Status::SampledEvidence, "", lt.witness, lt.value};
  if (!std::isfinite(lt.value)) {
    h.status = Status::Fails;
    h.detail = std::string(name) + ": difference quotients diverge";
  } else {
    h.detail = std::string(name) + ": sampled constant " + fmt(lt.value);
  }
  return h;
}

HypothesisStatus calm_status(const char* id, const std::string& name, const ScalarCalmResult& r) {
  HypothesisStatus h{id, r.holds ? Status::Holds : Status::Fails, "", {}, 0.0};
  std::ostringstream os;
  os << name << " (" << to_string(r.side) << "): quotients in [" << fmt(r.lower) << ", " << fmt(r.upper) << "]";
  h.detail = os.str();
  switch (r.side) {
    case Side::Above:
      h.value = r.upper;
      h.witness = r.witness_upper;
      break;
    case Side::Below:
      h.value = r.lower;
      h.witness = r.witness_lower;
      break;
    case Side::Both:
      h.value = std::max(std::abs(r.lower), std::abs(r.upper));
      h.witness = r.calm_above ? r.witness_lower : r.witness_upper;
      break;
  }
  return h;
}

bool any_fails(const std::vector<HypothesisStatus>& v) {
  return std::any_of(v.begin(), v.end(), [](const HypothesisStatus& h) { return h.status == Status::Fails; });
}

void require_optimal(const ParamOptProblem& prob) {
  const auto& s = prob.spec();
  if (!prob.feasible(s.p_ref, s.x_ref)) throw ContractViolation("reference state is infeasible at the reference parameter");
  const ValueResult v = prob.value(s.p_ref);
  if (s.objective(s.p_ref, s.x_ref) > v.value + s.tol_feas) {
    throw ContractViolation("reference state is not optimal on the grid: phi = " + fmt(s.objective(s.p_ref, s.x_ref)) +
                            " > val = " + fmt(v.value));
  }
}

}  // namespace

ParamOptProblem::ParamOptProblem(ParamOptSpec spec) : spec_(std::move(spec)), cache_(std::make_shared<Cache>()) {
  if (!spec_.objective) throw ContractViolation("optimization problem needs an objective");
  if (!spec_.constraint) {
    const std::size_t nh = spec_.x_dim;
    spec_.h_dim = nh;
    spec_.constraint = [](const Vector&, const Vector& x) { return x; };
    spec_.C = ClosedSet::whole_space(nh);
  }
  if (spec_.C.dim() != spec_.h_dim) throw ContractViolation("constraint set dimension differs from the constraint map");
  require_dim(spec_.p_ref, spec_.p_dim, "reference parameter");
  require_dim(spec_.x_ref, spec_.x_dim, "reference state");
  require_dim(spec_.x_region.lo, spec_.x_dim, "state region");
  require_dim(spec_.x_region.hi, spec_.x_dim, "state region");
  if (!(spec_.x_step > 0.0)) throw ContractViolation("grid step must be positive");
  x_grid_ = grid_points(spec_.x_region.lo, spec_.x_region.hi, spec_.x_step);

  // Sampled x-Lipschitz quotient of h on B(p_ref, nb) x B(x_ref, nb).
  const double nb = spec_.neighborhood;
  const std::size_t np = spec_.p_dim, nx = spec_.x_dim;
  const auto dirs = unit_directions(spec_.x_metric, nx, 8, 29);
  std::vector<Vector> ps{spec_.p_ref}, xs{spec_.x_ref};
  for (const auto& g : grid_points(Vector(np, -1.0), Vector(np, 1.0), 0.5)) ps.push_back(axpy(spec_.p_ref, nb, g));
  for (const auto& g : grid_points(Vector(nx, -1.0), Vector(nx, 1.0), 0.25)) xs.push_back(axpy(spec_.x_ref, nb, g));
  double q = 0.0;
  for (const auto& p : ps) {
    for (const auto& x : xs) {
      const Vector h0 = spec_.constraint(p, x);
      for (const auto& d : dirs) {
        for (double t : {1e-3, 0.0625}) {
          const Vector z = axpy(x, t, d);
          q = std::max(q, spec_.h_metric.distance(spec_.constraint(p, z), h0) / spec_.x_metric.distance(z, x));
        }
      }
    }
  }
  kappa_sampled_ = q;
  kappa_ = spec_.kappa > 0.0 ? std::max(spec_.kappa, q) : 1.1 * q;
}

Vector ParamOptProblem::constraint(const Vector& p, const Vector& x) const { return spec_.constraint(p, x); }

bool ParamOptProblem::feasible(const Vector& p, const Vector& x) const {
  return spec_.C.distance(spec_.constraint(p, x)) <= spec_.tol_feas;
}

ValueResult ParamOptProblem::value(const Vector& p) const {
  {
    std::lock_guard<std::mutex> lock(cache_->mutex);
    auto it = cache_->entries.find(p);
    if (it != cache_->entries.end()) {
      cache_->order.splice(cache_->order.begin(), cache_->order, it->second.second);
      return it->second.first;
    }
  }
  ValueResult r = value_function(*this, p);
  std::lock_guard<std::mutex> lock(cache_->mutex);
  if (cache_->entries.find(p) == cache_->entries.end()) {
    cache_->order.push_front(p);
    cache_->entries.emplace(p, std::make_pair(r, cache_->order.begin()));
    if (cache_->entries.size() > kCacheCapacity) {
      cache_->entries.erase(cache_->order.back());
      cache_->order.pop_back();
    }
  }
  return r;
}

ValueResult value_function(const ParamOptProblem& prob, const Vector& p, const ValueScope& scope) {
  require_dim(p, prob.spec().p_dim, "parameter");
  ValueResult r;
  for (const auto& x : prob.x_grid()) {
    if (scope.local && prob.spec().x_metric.distance(x, scope.center) > scope.radius + 1e-12) continue;
    if (!prob.feasible(p, x)) continue;
    ++r.feasible;
    const double v = prob.objective(p, x);
    if (v < r.value) {
      r.value = v;
      r.argmin.clear();
    }
    // Grid order is lexicographic, so the first minimizer is the smallest.
    if (v == r.value) r.argmin.push_back(x);
  }
  return r;
}

const char* to_string(Side s) {
  switch (s) {
    case Side::Above: return "above";
    case Side::Below: return "below";
    case Side::Both: return "both";
  }
  return "?";
}

ScalarCalmResult scalar_calmness(const std::function<double(const Vector&)>& g, const Vector& pbar, Side side,
                                 const ScalarCalmConfig& cfg) {
  const double g0 = g(pbar);
  if (!std::isfinite(g0)) throw DomainError("scalar calmness needs a finite value at the base point");
  const Scales sc = parameter_scales(pbar, cfg.metric, pbar.size(), cfg.r0, cfg.ratio, cfg.scales, cfg.extra_dirs,
                                     cfg.seed, 0.0);
  ScalarCalmResult r;
  r.side = side;
  r.radii = sc.radii;
  r.upper = -kInf;
  r.lower = kInf;
  std::vector<double> neg_lower;
  for (std::size_t k = 0; k < sc.radii.size(); ++k) {
    const auto& pts = sc.points[k];
    std::vector<double> q(pts.size());
    parallel_for(pts.size(), [&](std::size_t i) { q[i] = (g(pts[i]) - g0) / cfg.metric.distance(pts[i], pbar); });
    double hi = -kInf, lo = kInf;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (q[i] > hi) hi = q[i];
      if (q[i] < lo) lo = q[i];
      if (q[i] > r.upper) {
        r.upper = q[i];
        r.witness_upper = pts[i];
      }
      if (q[i] < r.lower) {
        r.lower = q[i];
        r.witness_lower = pts[i];
      }
    }
    r.upper_trace.push_back(hi);
    r.lower_trace.push_back(lo);
    neg_lower.push_back(-lo);
  }
  const bool up_div = diverging_trace(r.upper_trace);
  const bool lo_div = diverging_trace(neg_lower);
  if (up_div) r.upper = kInf;
  if (lo_div) r.lower = -kInf;
  r.calm_above = std::isfinite(r.upper) || r.upper == -kInf;
  r.calm_below = std::isfinite(r.lower) || r.lower == kInf;
  switch (side) {
    case Side::Above: r.holds = r.calm_above; break;
    case Side::Below: r.holds = r.calm_below; break;
    case Side::Both: r.holds = r.calm_above && r.calm_below; break;
  }
  return r;
}

ProblemCalmResult problem_calmness(const ParamOptProblem& prob, double r, const CheckConfig& cfg) {
  require_optimal(prob);
  const auto& s = prob.spec();
  const ScalarCalmConfig sc = scalar_config(prob, cfg);
  const Scales scales =
      parameter_scales(s.p_ref, s.p_metric, s.p_dim, sc.r0, sc.ratio, sc.scales, sc.extra_dirs, sc.seed, 0.0);
  const double f0 = s.objective(s.p_ref, s.x_ref);
  std::vector<Vector> xs;
  for (const auto& x : prob.x_grid()) {
    if (s.x_metric.distance(x, s.x_ref) <= r + 1e-12) xs.push_back(x);
  }
  ProblemCalmResult res;
  res.inf_quotient = kInf;
  std::vector<double> neg;
  for (std::size_t k = 0; k < scales.radii.size(); ++k) {
    if (scales.radii[k] > r) continue;
    const auto& pts = scales.points[k];
    std::vector<double> best(pts.size(), kInf);
    std::vector<Vector> arg(pts.size());
    parallel_for(pts.size(), [&](std::size_t i) {
      const double dp = s.p_metric.distance(pts[i], s.p_ref);
      for (const auto& x : xs) {
        if (!prob.feasible(pts[i], x)) continue;
        const double q = (s.objective(pts[i], x) - f0) / dp;
        if (q < best[i]) {
          best[i] = q;
          arg[i] = x;
        }
      }
    });
    double lo = kInf;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      lo = std::min(lo, best[i]);
      if (best[i] < res.inf_quotient) {
        res.inf_quotient = best[i];
        res.witness_p = pts[i];
        res.witness_x = arg[i];
      }
    }
    res.radii.push_back(scales.radii[k]);
    res.trace.push_back(lo);
    neg.push_back(-lo);
  }
  if (diverging_trace(neg)) res.inf_quotient = -kInf;
  res.calm = res.inf_quotient > -kInf;
  return res;
}

const char* to_string(ValueProp p) {
  switch (p) {
    case ValueProp::P1: return "P1";
    case ValueProp::P2: return "P2";
    case ValueProp::P3: return "P3";
    case ValueProp::P4: return "P4";
  }
  return "?";
}

PropReport check_value_function_props(const ParamOptProblem& prob, ValueProp which, const CheckConfig& cfg) {
  const auto& s = prob.spec();
  PropReport rep;
  rep.which = which;
  const ScalarCalmConfig sc = scalar_config(prob, cfg);
  auto valf = [&prob](const Vector& p) { return prob.value(p).value; };
  const OracleGrid og = opt_oracle_grid(prob, cfg);
  const double local_r = 0.5 * cfg.calm_delta;

  try {
    switch (which) {
      case ValueProp::P1: {
        const ScalarCalmResult v = scalar_calmness(valf, s.p_ref, Side::Below, sc);
        rep.hypotheses.push_back(calm_status("valf", "value function", v));
        const ProblemCalmResult pc = problem_calmness(prob, cfg.calm_delta, cfg);
        rep.conclusion = {"problem_calm", pc.calm ? Status::Holds : Status::Fails,
                          "inf quotient " + fmt(pc.inf_quotient), concat(pc.witness_p, pc.witness_x), pc.inf_quotient};
        break;
      }
      case ValueProp::P2: {
        const EmpiricalEstimate R = empirical_modulus(feasible_map(prob), ModulusKind::LipLsc, og);
        rep.hypotheses.push_back(modulus_status("R_liplsc", "R Lipschitz lsc", R));
        const Metric zm = Metric::product(s.p_metric, s.p_dim, s.x_metric, s.x_dim);
        ScalarCalmConfig zc = sc;
        zc.metric = zm;
        const std::size_t np = s.p_dim, nx = s.x_dim;
        const ScalarCalmResult phi = scalar_calmness(
            [&](const Vector& z) { return s.objective(slice(z, 0, np), slice(z, np, nx)); }, concat(s.p_ref, s.x_ref),
            Side::Above, zc);
        rep.hypotheses.push_back(calm_status("phi_calm_above", "objective", phi));
        const ScalarCalmResult v = scalar_calmness(valf, s.p_ref, Side::Above, sc);
        rep.conclusion = calm_status("valf_calm_above", "value function", v);
        break;
      }
      case ValueProp::P3: {
        const EmpiricalEstimate R = empirical_modulus(feasible_map(prob), ModulusKind::UpperLipschitz, og);
        rep.hypotheses.push_back(modulus_status("R_upper_lipschitz", "R upper Lipschitz", R));
        const LipschitzTrace lt = phi_lipschitz(prob, s.p_ref, s.x_ref, s.neighborhood);
        rep.hypotheses.push_back(lipschitz_status("phi_lipschitz", "objective Lipschitz", lt));
        const ScalarCalmResult v = scalar_calmness(valf, s.p_ref, Side::Below, sc);
        rep.conclusion = calm_status("valf_calm_below", "value function", v);
        if (std::isfinite(R.value) && std::isfinite(lt.value)) {
          rep.quantitative_bound = -lt.value * (R.value + 2.0);
          rep.quantitative_value = v.lower;
          rep.quantitative_ok = v.lower >= *rep.quantitative_bound - 0.05;
        }
        break;
      }
      case ValueProp::P4: {
        const EmpiricalEstimate R = empirical_modulus(feasible_map(prob), ModulusKind::Calm, og);
        rep.hypotheses.push_back(modulus_status("R_calm", "R calm", R));
        const LipschitzTrace lt = phi_lipschitz(prob, s.p_ref, s.x_ref, s.neighborhood);
        rep.hypotheses.push_back(lipschitz_status("phi_local_lipschitz", "objective locally Lipschitz", lt));
        const ValueScope scope{true, s.x_ref, local_r};
        auto locvalf = [&prob, &scope](const Vector& p) { return value_function(prob, p, scope).value; };
        const ScalarCalmResult v = scalar_calmness(locvalf, s.p_ref, Side::Below, sc);
        rep.conclusion = calm_status("locvalf_calm_below", "local value function", v);
        break;
      }
    }
  } catch (const DomainError& e) {
    rep.conclusion = {"conclusion", Status::Fails, e.what(), {}, 0.0};
  }
  rep.hypotheses_hold = !any_fails(rep.hypotheses);
  const bool concl = rep.conclusion.status != Status::Fails && rep.quantitative_ok;
  rep.bug = rep.hypotheses_hold && !concl;
  if (concl) {
    rep.outcome = Outcome::Holds;
  } else {
    rep.outcome = rep.hypotheses_hold ? Outcome::Undetermined : Outcome::Fails;
  }
  return rep;
}

const char* to_string(ArgminVariant v) {
  switch (v) {
    case ArgminVariant::Slope: return "slope";
    case ArgminVariant::Subdifferential: return "subdifferential";
    case ArgminVariant::Smooth: return "smooth";
  }
  return "?";
}

GenEqProblem argmin_generalized_equation(const ParamOptProblem& prob) {
  const auto& s = prob.spec();
  GenEqSpec g;
  g.name = s.name + "_argmin";
  g.dims = {s.p_dim, s.x_dim, 1 + s.h_dim};
  g.base = BaseFn(g.dims, [prob](const Vector& p, const Vector& x) {
    return concat({prob.objective(p, x) - prob.value(p).value}, prob.constraint(p, x));
  });
  const ClosedSet field = ClosedSet::product({ClosedSet::singleton({0.0}), s.C});
  g.field = [field](const Vector&, const Vector&) { return field; };
  g.p_ref = s.p_ref;
  g.x_ref = s.x_ref;
  g.p_region = s.p_region;
  g.x_region = s.x_region;
  g.p_metric = s.p_metric;
  g.x_metric = s.x_metric;
  g.y_metric = Metric::product(Metric::euclidean(), 1, s.h_metric, s.h_dim);
  g.tol_feas = s.tol_feas;
  return GenEqProblem(std::move(g));
}

CheckConfig argmin_check_config(const ParamOptProblem& prob, CheckConfig cfg) {
  cfg.x_step = prob.spec().x_step;
  // Non-optimal feasible grid points differ from valf by a positive amount,
  // the optimal ones by exactly zero.
  cfg.solve_tol = 1e-12;
  cfg.p_scales = scalar_config(prob, cfg).scales;
  return cfg;
}

ArgminReport check_argmin_liplsc(const ParamOptProblem& prob, ArgminVariant variant, const CheckConfig& cfg0) {
  require_optimal(prob);
  const auto& s = prob.spec();
  const CheckConfig cfg = argmin_check_config(prob, cfg0);
  ArgminReport rep;
  rep.variant = variant;
  rep.kappa = prob.kappa();

  rep.hypotheses.push_back({"i", Status::Holds, "finite-dimensional spaces are complete", {}, 0.0});
  {
    // Continuity of phi(p, .) near the reference: sampled oscillation shrinks.
    const auto dirs = unit_directions(s.x_metric, s.x_dim, 8, cfg.seed);
    double coarse = 0.0, fine = 0.0;
    const double rc = cfg.schedule.radius(0), rf = cfg.schedule.radius(cfg.schedule.levels - 1);
    const double f0 = s.objective(s.p_ref, s.x_ref);
    for (const auto& d : dirs) {
      coarse = std::max(coarse, std::abs(s.objective(s.p_ref, axpy(s.x_ref, rc, d)) - f0));
      fine = std::max(fine, std::abs(s.objective(s.p_ref, axpy(s.x_ref, rf, d)) - f0));
    }
    const bool jump = fine > 1e-6 && fine > 0.5 * coarse;
    rep.hypotheses.push_back({"ii", jump ? Status::Fails : Status::SampledEvidence,
                              "oscillation of phi(p_ref, .) at the finest radius " + fmt(fine), s.x_ref, fine});
  }
  rep.hypotheses.push_back({"iii", Status::Holds,
                            "h is x-Lipschitz with sampled constant " + fmt(prob.kappa_sampled()) + ", kappa = " +
                                fmt(rep.kappa),
                            {}, rep.kappa});
  {
    const ScalarCalmConfig sc = scalar_config(prob, cfg);
    const ScalarCalmResult a = scalar_calmness([&](const Vector& p) { return s.objective(p, s.x_ref); }, s.p_ref,
                                               Side::Both, sc);
    const Vector h0 = prob.constraint(s.p_ref, s.x_ref);
    const ScalarCalmResult b = scalar_calmness(
        [&](const Vector& p) { return s.h_metric.distance(prob.constraint(p, s.x_ref), h0); }, s.p_ref, Side::Above, sc);
    const ScalarCalmResult c =
        scalar_calmness([&](const Vector& p) { return prob.value(p).value; }, s.p_ref, Side::Both, sc);
    HypothesisStatus h{"iv", Status::Holds, "", {}, 0.0};
    if (!a.holds) h = calm_status("iv", "phi(., x_ref)", a);
    else if (!b.holds) h = calm_status("iv", "h(., x_ref)", b);
    else if (!c.holds) h = calm_status("iv", "value function", c);
    else h.detail = "phi(., x_ref), h(., x_ref) and the value function are calm at p_ref";
    rep.hypotheses.push_back(h);
  }

  HypothesisStatus hv{"v", Status::Holds, "", {}, 0.0};
  switch (variant) {
    case ArgminVariant::Slope: {
      const BivariateMap phi{s.objective, s.p_metric, s.x_metric, s.p_dim, s.x_dim};
      const SlopeEstimate est = partial_strict_outer_slope_x(phi, s.p_ref, s.x_ref, cfg.schedule);
      rep.slope = est.value;
      hv.witness = est.witness;
      hv.detail = "partial strict outer slope of phi = " + fmt(est.value);
      break;
    }
    case ArgminVariant::Subdifferential: {
      if (!s.subdiff_x_objective && !s.grad_x_objective) {
        throw Unsupported("subdifferential variant needs the x-subdifferential or gradient of phi");
      }
      const std::size_t np = s.p_dim, nx = s.x_dim;
      ScalarMap joint;
      joint.metric = Metric::product(s.p_metric, np, s.x_metric, nx);
      joint.dim = np + nx;
      joint.value = [&](const Vector& z) { return s.objective(slice(z, 0, np), slice(z, np, nx)); };
      const Vector zbar = concat(s.p_ref, s.x_ref);
      double value = kInf;
      for (int k = 0; k < cfg.schedule.levels; ++k) {
        const auto pts = qualifying_points(joint, zbar, cfg.schedule.radius(k), cfg.schedule, k);
        double lvl = kInf;
        Vector arg;
        for (const auto& z : pts) {
          const Vector p = slice(z, 0, np), x = slice(z, np, nx);
          const SubdifferentialRep sd = s.subdiff_x_objective ? s.subdiff_x_objective(p, x)
                                                               : SubdifferentialRep::singleton(s.grad_x_objective(p, x));
          const double m = sd.min_norm(s.x_metric);
          if (m < lvl) {
            lvl = m;
            arg = z;
          }
        }
        value = lvl;
        hv.witness = arg;
      }
      rep.slope = value;
      hv.detail = "liminf of |x*| over the x-subdifferential of phi = " + fmt(value);
      break;
    }
    case ArgminVariant::Smooth: {
      if (!s.grad_x_objective || !s.jac_x_constraint) {
        throw Unsupported("smooth variant needs the x-gradient of phi and the x-Jacobian of h");
      }
      rep.slope = s.x_metric.dual_norm(s.grad_x_objective(s.p_ref, s.x_ref));
      const double nb = s.neighborhood;
      const auto dirs = unit_directions(s.x_metric, s.x_dim, 64, cfg.seed);
      double sup = 0.0;
      for (const auto& gp : grid_points(Vector(s.p_dim, -1.0), Vector(s.p_dim, 1.0), 0.25)) {
        const Vector p = axpy(s.p_ref, nb, gp);
        if (s.p_metric.distance(p, s.p_ref) > nb * (1 + 1e-12)) continue;
        for (const auto& gx : grid_points(Vector(s.x_dim, -1.0), Vector(s.x_dim, 1.0), 0.25)) {
          const Vector x = axpy(s.x_ref, nb, gx);
          if (s.x_metric.distance(x, s.x_ref) > nb * (1 + 1e-12)) continue;
          const Matrix J = s.jac_x_constraint(p, x);
          for (const auto& d : dirs) {
            Vector jd(J.size(), 0.0);
            for (std::size_t r = 0; r < J.size(); ++r) jd[r] = dot(J[r], d);
            sup = std::max(sup, s.h_metric.norm(jd));
          }
        }
      }
      rep.kappa = sup;
      hv.detail = "|grad_x phi| = " + fmt(rep.slope) + " against sup |grad_x h| = " + fmt(sup);
      break;
    }
  }
  hv.value = rep.slope;
  if (!(rep.slope > rep.kappa)) {
    hv.status = Status::Fails;
    hv.detail += " is not greater than kappa = " + fmt(rep.kappa);
  } else {
    hv.detail += " > kappa = " + fmt(rep.kappa);
  }
  rep.hypotheses.push_back(hv);
  if (any_fails(rep.hypotheses)) {
    rep.outcome = Outcome::Fails;
    return rep;
  }

  const GenEqProblem ge = argmin_generalized_equation(prob);
  rep.liplsc = check_liplsc(ge, cfg);
  if (rep.liplsc->outcome == Outcome::Fails) {
    rep.outcome = Outcome::Fails;
    return rep;
  }
  rep.outcome = rep.liplsc->outcome;
  if (!cfg.validate) return rep;

  // G(p) and Argmin(p) agree pointwise on the grid.
  std::vector<Vector> ps{s.p_ref};
  for (std::size_t i = 0; i < s.p_dim; ++i) {
    for (double t : {0.1, -0.1, 0.25, -0.25, 0.5, -0.5}) {
      const Vector p = axpy(s.p_ref, t, unit_vector(s.p_dim, i));
      if (s.p_region.contains(p)) ps.push_back(p);
    }
  }
  for (const auto& p : ps) {
    const SolutionSample sol = solve_on_grid(ge, p, s.x_region, s.x_step, cfg.resolved_solve_tol());
    if (sol.points != prob.value(p).argmin) rep.argmin_matches = false;
  }
  rep.oracle = empirical_modulus(argmin_map(prob), ModulusKind::LipLsc, opt_oracle_grid(prob, cfg));
  if (rep.liplsc->bound) {
    rep.verdict = verdict_compare(*rep.liplsc->bound, *rep.oracle, cfg.slack, s.x_step);
    if (!rep.verdict->pass) rep.outcome = Outcome::Undetermined;
  }
  if (!rep.argmin_matches) rep.outcome = Outcome::Undetermined;
  return rep;
}

}  // namespace varistab
