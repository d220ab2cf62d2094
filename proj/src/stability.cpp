#include "varistab/stability.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "varistab/errors.hpp"

namespace varistab {

const char* to_string(Status s) {
  switch (s) {
    case Status::Holds: return "Holds";
    case Status::Fails: return "Fails";
    case Status::SampledEvidence: return "SampledEvidence";
  }
  return "?";
}

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::Holds: return "Holds";
    case Outcome::Fails: return "Fails";
    case Outcome::Undetermined: return "Undetermined";
  }
  return "?";
}

double CheckConfig::resolved_delta_star(const GenEqProblem& prob) const {
  return delta_star > 0.0 ? delta_star : 0.5 * prob.x_region().radius();
}

OracleGrid CheckConfig::oracle_grid(const GenEqProblem& prob) const {
  OracleGrid g;
  g.p_ref = prob.p_ref();
  g.x_ref = prob.x_ref();
  g.r0 = p_r0;
  g.ratio = p_ratio;
  g.extra_dirs = p_extra_dirs;
  g.seed = seed;
  g.delta = calm_delta;
  // Quotients at parameter scales comparable to the x-grid spacing measure
  // the grid, not the mapping.
  int scales = 0;
  for (double r = p_r0; scales < p_scales && r >= 8.0 * x_step; r *= p_ratio) ++scales;
  g.scales = std::max(scales, 1);
  return g;
}

namespace {

struct PPoint {
  Vector p;
  int scale;
};

std::vector<PPoint> parameter_points(const GenEqProblem& prob, const CheckConfig& cfg) {
  std::vector<PPoint> out;
  const auto dirs = unit_directions(prob.p_metric(), prob.dims().p, cfg.p_extra_dirs, cfg.seed);
  double r = cfg.p_r0;
  for (int k = 0; k < cfg.p_scales; ++k, r *= cfg.p_ratio) {
    for (const auto& d : dirs) out.push_back({axpy(prob.p_ref(), r, d), k});
  }
  return out;
}

std::vector<double> scale_radii(const CheckConfig& cfg) {
  std::vector<double> r;
  double v = cfg.p_r0;
  for (int k = 0; k < cfg.p_scales; ++k, v *= cfg.p_ratio) r.push_back(v);
  return r;
}

// State points for uniform constants: a grid of B(x_ref, delta) at 1/8 of the
// radius per axis.
std::vector<Vector> state_window(const GenEqProblem& prob, double delta) {
  const std::size_t n = prob.dims().x;
  std::vector<Vector> out;
  for (const auto& g : grid_points(Vector(n, -1.0), Vector(n, 1.0), 0.125)) {
    const Vector x = axpy(prob.x_ref(), delta, g);
    if (prob.x_metric().distance(x, prob.x_ref()) <= delta * (1 + 1e-12)) out.push_back(x);
  }
  return out;
}

// Points of F obtained by projecting a window around `center`.
std::vector<Vector> sample_set(const ClosedSet& set, const Vector& center, std::initializer_list<Vector> extra = {}) {
  std::vector<Vector> out;
  if (set.empty()) return out;
  const std::size_t n = center.size();
  for (const auto& u : grid_points(Vector(n, -1.0), Vector(n, 1.0), 0.25)) out.push_back(set.project(add(center, u)));
  for (const auto& e : extra) out.push_back(set.project(e));
  return out;
}

void reduce_trace(const std::vector<double>& q, const std::vector<int>& scale, std::size_t nscales,
                  std::vector<double>& trace, double& value, bool& diverging) {
  trace.assign(nscales, 0.0);
  value = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    trace[static_cast<std::size_t>(scale[i])] = std::max(trace[static_cast<std::size_t>(scale[i])], q[i]);
    value = std::max(value, q[i]);
  }
  diverging = diverging_trace(trace);
  if (diverging) value = kInf;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// Shrinkage test shared by the semicontinuity and continuity surrogates: the
// sampled oscillation at the finest radius must shrink against the coarsest.
struct Oscillation {
  double coarse = 0.0, fine = 0.0;
  Vector witness;
  bool persistent() const { return fine > 1e-6 && fine > 0.5 * coarse; }
};

Oscillation oscillation(const std::vector<Vector>& ps, const std::vector<Vector>& xs, const Metric& xm,
                        std::size_t dx, const RadiusSchedule& schedule,
                        const std::function<double(const Vector&, const Vector&, const Vector&)>& measure) {
  const auto dirs = unit_directions(xm, dx, 8, schedule.seed);
  Oscillation o;
  const double r_coarse = schedule.radius(0), r_fine = schedule.radius(schedule.levels - 1);
  for (const auto& p : ps) {
    for (const auto& x : xs) {
      for (const auto& d : dirs) {
        o.coarse = std::max(o.coarse, measure(p, x, axpy(x, r_coarse, d)));
        const Vector z = axpy(x, r_fine, d);
        const double m = measure(p, x, z);
        if (m > o.fine) {
          o.fine = m;
          o.witness = concat(concat(p, x), z);
        }
      }
    }
  }
  return o;
}

std::vector<Vector> probe_states(const GenEqProblem& prob, double delta) {
  std::vector<Vector> xs{prob.x_ref()};
  for (std::size_t i = 0; i < prob.dims().x; ++i) {
    for (double s : {0.5, -0.5}) xs.push_back(axpy(prob.x_ref(), s * delta, unit_vector(prob.dims().x, i)));
  }
  return xs;
}

std::vector<Vector> probe_params(const GenEqProblem& prob, const CheckConfig& cfg) {
  std::vector<Vector> ps{prob.p_ref()};
  for (const auto& pp : parameter_points(prob, cfg)) {
    if (pp.scale <= 1) ps.push_back(pp.p);
  }
  return ps;
}

HypothesisStatus usc_surrogate(const GenEqProblem& prob, const std::vector<Vector>& ps, const std::vector<Vector>& xs,
                               const RadiusSchedule& schedule, const char* id) {
  auto excess_at = [&](const Vector& p, const Vector& x, const Vector& z) {
    const ClosedSet fz = prob.field()(p, z);
    const ClosedSet fx = prob.field()(p, x);
    const Vector center = prob.base()(p, x);
    return excess(sample_set(fz, center, {prob.y_ref()}), fx);
  };
  const Oscillation o = oscillation(ps, xs, prob.x_metric(), prob.dims().x, schedule, excess_at);
  HypothesisStatus h{id, Status::SampledEvidence, "", o.witness, o.fine};
  if (o.persistent()) {
    h.status = Status::Fails;
    h.detail = "excess of F(p,z) over F(p,x) does not shrink as z -> x: " + fmt(o.fine) + " at the finest radius";
  } else {
    h.detail = "sampled excess of F(p,z) over F(p,x) shrinks to " + fmt(o.fine);
  }
  return h;
}

HypothesisStatus continuity_surrogate(const GenEqProblem& prob, const std::vector<Vector>& ps,
                                      const std::vector<Vector>& xs, const RadiusSchedule& schedule, const char* id) {
  auto jump = [&](const Vector& p, const Vector& x, const Vector& z) {
    return prob.y_metric().distance(prob.base()(p, z), prob.base()(p, x));
  };
  const Oscillation o = oscillation(ps, xs, prob.x_metric(), prob.dims().x, schedule, jump);
  HypothesisStatus h{id, Status::SampledEvidence, "", o.witness, o.fine};
  if (o.persistent()) {
    h.status = Status::Fails;
    h.detail = "d(f(p,z), f(p,x)) does not shrink as z -> x: " + fmt(o.fine);
  } else {
    h.detail = "sampled oscillation of f shrinks to " + fmt(o.fine);
  }
  return h;
}

HypothesisStatus constant_status(const char* id, const char* name, double value, bool diverging,
                                 const Vector& witness) {
  HypothesisStatus h{id, Status::Holds, "", witness, value};
  if (diverging || !std::isfinite(value)) {
    h.status = Status::Fails;
    h.detail = std::string(name) + (diverging ? " quotients diverge across parameter scales" : " is infinite");
  } else {
    h.detail = std::string(name) + " = " + fmt(value);
  }
  return h;
}

HypothesisStatus slope_status(const char* id, const SlopeEstimate& s, double positivity, const char* name) {
  HypothesisStatus h{id, Status::Holds, "", s.witness, s.value};
  if (s.value >= positivity) {
    h.detail = std::string(name) + " = " + fmt(s.value) + (s.empty_level ? " (no qualifying point at some level)" : "");
  } else {
    h.status = Status::Fails;
    h.detail = std::string(name) + " = " + fmt(s.value) + " is not positive";
  }
  return h;
}

bool any_fails(const std::vector<HypothesisStatus>& v) {
  return std::any_of(v.begin(), v.end(), [](const HypothesisStatus& h) { return h.status == Status::Fails; });
}

}  // namespace

PerturbationConstants estimate_perturbation_constants(const GenEqProblem& prob, ConstantsMode mode,
                                                      const CheckConfig& cfg) {
  PerturbationConstants out;
  out.mode = mode;
  out.scale_radius = scale_radii(cfg);
  const auto pts = parameter_points(prob, cfg);
  for (const auto& pp : pts) {
    if (prob.p_metric().distance(pp.p, prob.p_ref()) <= 0.0) throw ContractViolation("parameter grid contains the reference");
  }
  std::vector<double> qf, qF;
  std::vector<int> sf, sF;
  std::vector<Vector> wf, wF;
  if (mode == ConstantsMode::Pointwise) {
    qf.resize(pts.size());
    qF.resize(pts.size());
    parallel_for(pts.size(), [&](std::size_t i) {
      const double dp = prob.p_metric().distance(pts[i].p, prob.p_ref());
      qF[i] = prob.field()(pts[i].p, prob.x_ref()).distance(prob.y_ref()) / dp;
      qf[i] = prob.y_metric().distance(prob.base()(pts[i].p, prob.x_ref()), prob.y_ref()) / dp;
    });
    for (const auto& pp : pts) {
      sf.push_back(pp.scale);
      wf.push_back(pp.p);
    }
    sF = sf;
    wF = wf;
  } else {
    const auto xs = state_window(prob, cfg.resolved_delta_star(prob));
    const std::size_t n = pts.size() * xs.size();
    qf.resize(n);
    qF.resize(n);
    parallel_for(n, [&](std::size_t idx) {
      const Vector& p = pts[idx / xs.size()].p;
      const Vector& x = xs[idx % xs.size()];
      const double dp = prob.p_metric().distance(p, prob.p_ref());
      const Vector fp = prob.base()(p, x), f0 = prob.base()(prob.p_ref(), x);
      qf[idx] = prob.y_metric().distance(fp, f0) / dp;
      const ClosedSet Fp = prob.field()(p, x), F0 = prob.field()(prob.p_ref(), x);
      qF[idx] = excess(sample_set(Fp, prob.y_ref(), {fp, f0}), F0) / dp;
    });
    for (std::size_t idx = 0; idx < n; ++idx) {
      sf.push_back(pts[idx / xs.size()].scale);
      wf.push_back(concat(pts[idx / xs.size()].p, xs[idx % xs.size()]));
    }
    sF = sf;
    wF = wf;
  }
  const std::size_t ns = out.scale_radius.size();
  reduce_trace(qf, sf, ns, out.f_trace, out.l_f, out.f_diverging);
  reduce_trace(qF, sF, ns, out.F_trace, out.l_F, out.F_diverging);
  auto argmax = [](const std::vector<double>& q) {
    return static_cast<std::size_t>(std::max_element(q.begin(), q.end()) - q.begin());
  };
  if (!qf.empty()) out.f_witness = wf[argmax(qf)];
  if (!qF.empty()) out.F_witness = wF[argmax(qF)];
  return out;
}

LiplscReport check_liplsc(const GenEqProblem& prob, const CheckConfig& cfg) {
  LiplscReport rep;
  const double delta = cfg.resolved_delta_star(prob);
  const auto ps = probe_params(prob, cfg);
  const auto xs = probe_states(prob, delta);
  rep.statuses.push_back({"i", Status::Holds, "finite-dimensional spaces are complete", {}, 0.0});
  rep.statuses.push_back(usc_surrogate(prob, ps, xs, cfg.schedule, "ii"));
  rep.constants = estimate_perturbation_constants(prob, ConstantsMode::Pointwise, cfg);
  rep.statuses.push_back(constant_status("iii", "l_F", rep.constants.l_F, rep.constants.F_diverging, rep.constants.F_witness));
  rep.statuses.push_back(continuity_surrogate(prob, ps, xs, cfg.schedule, "iv"));
  rep.statuses.push_back(constant_status("v", "l_f", rep.constants.l_f, rep.constants.f_diverging, rep.constants.f_witness));

  BivariateMap psi{[&prob](const Vector& p, const Vector& x) { return displacement(prob, p, x); },
                   prob.p_metric(), prob.x_metric(), prob.dims().p, prob.dims().x};
  rep.slope = partial_strict_outer_slope_x(psi, prob.p_ref(), prob.x_ref(), cfg.schedule);
  rep.statuses.push_back(slope_status("vi", rep.slope, cfg.positivity, "partial strict outer slope"));

  if (any_fails(rep.statuses)) {
    rep.outcome = Outcome::Fails;
    return rep;
  }
  const double lsum = rep.constants.l_f + rep.constants.l_F;
  const double c = rep.slope.value;
  rep.bound = std::isfinite(c) ? lsum / c : 0.0;
  rep.zeta = std::min({0.5, (std::isfinite(c) ? c : 1.0) / (2.0 * (lsum + 1.0)), 1.0 / (lsum + 1.0)}) * delta;
  rep.outcome = Outcome::Holds;
  if (!cfg.validate) return rep;

  // Validation: nearest grid solution within the bound at each offset.
  const double tol = cfg.resolved_solve_tol();
  for (std::size_t i = 0; i < prob.dims().p; ++i) {
    for (double s : {1.0, -1.0}) {
      for (double t : cfg.validation_offsets) {
        const Vector p = axpy(prob.p_ref(), s * t, unit_vector(prob.dims().p, i));
        if (!prob.p_region().contains(p)) continue;
        const SolutionSample sol = solve_on_grid(prob, p, prob.x_region(), cfg.x_step, tol);
        double best = kInf;
        for (const auto& x : sol.points) best = std::min(best, prob.x_metric().distance(x, prob.x_ref()));
        const double dp = prob.p_metric().distance(p, prob.p_ref());
        const double allowed = *rep.bound * dp * (1.0 + cfg.slack) + cfg.x_step;
        rep.validation.push_back({p, best, allowed, best <= allowed});
        if (best > allowed) rep.validation_pass = false;
      }
    }
  }
  rep.oracle = empirical_modulus(solution_map(prob, cfg.x_step, tol), ModulusKind::LipLsc, cfg.oracle_grid(prob));
  rep.verdict = verdict_compare(*rep.bound, *rep.oracle, cfg.slack, cfg.x_step);
  if (!rep.validation_pass || !rep.verdict->pass) rep.outcome = Outcome::Undetermined;
  return rep;
}

ScalarMap graph_displacement_map(const GenEqProblem& prob) {
  const std::size_t dx = prob.dims().x, dy = prob.dims().y;
  ScalarMap g;
  g.value = [&prob, dx, dy](const Vector& z) { return graph_displacement(prob, slice(z, 0, dx), slice(z, dx, dy)); };
  g.metric = prob.xy_metric();
  g.dim = dx + dy;
  g.retract = [&prob, dx, dy](const Vector& z) {
    const Vector x = slice(z, 0, dx);
    const ClosedSet v = prob.field()(prob.p_ref(), x);
    if (v.empty()) return z;
    return concat(x, v.project(slice(z, dx, dy)));
  };
  return g;
}

CalmReport check_calm(const GenEqProblem& prob, const CheckConfig& cfg) {
  CalmReport rep;
  const double delta = cfg.resolved_delta_star(prob);
  const std::vector<Vector> pref{prob.p_ref()};
  const auto xs = probe_states(prob, delta);
  rep.statuses.push_back({"i", Status::Holds, "finite-dimensional spaces are complete", {}, 0.0});
  HypothesisStatus closed{"ii", Status::SampledEvidence,
                          "graph of F(p_ref, .) is closed by representation (checked globally, not only near the point)",
                          {}, 0.0};
  rep.statuses.push_back(closed);
  rep.constants = estimate_perturbation_constants(prob, ConstantsMode::Uniform, cfg);
  rep.statuses.push_back(constant_status("iii", "uniform l_F", rep.constants.l_F, rep.constants.F_diverging,
                                         rep.constants.F_witness));
  rep.statuses.push_back(continuity_surrogate(prob, pref, xs, cfg.schedule, "iv"));
  rep.statuses.push_back(constant_status("v", "uniform l_f", rep.constants.l_f, rep.constants.f_diverging,
                                         rep.constants.f_witness));
  rep.slope = strict_outer_slope(graph_displacement_map(prob), concat(prob.x_ref(), prob.y_ref()), cfg.schedule);
  rep.statuses.push_back(slope_status("vi", rep.slope, cfg.positivity, "strict outer slope of disp"));
  if (any_fails(rep.statuses)) {
    rep.outcome = Outcome::Fails;
    return rep;
  }
  const double slope = rep.slope.value;
  rep.bound = std::isfinite(slope) ? (rep.constants.l_f + rep.constants.l_F) / slope : 0.0;
  rep.outcome = Outcome::Holds;
  if (!cfg.validate) return rep;
  rep.oracle = empirical_modulus(solution_map(prob, cfg.x_step, cfg.resolved_solve_tol()), ModulusKind::Calm,
                                 cfg.oracle_grid(prob));
  rep.verdict = verdict_compare(*rep.bound, *rep.oracle, cfg.slack, cfg.x_step);
  if (!rep.verdict->pass) rep.outcome = Outcome::Undetermined;
  return rep;
}

CoderivativeCalmReport check_calm_coderivative(const GenEqProblem& prob, const CheckConfig& cfg) {
  if (!prob.base().is_null()) throw ContractViolation("check_calm_coderivative requires a null base");
  CoderivativeCalmReport rep;
  rep.statuses.push_back({"i", Status::Holds, "finite-dimensional spaces are Asplund", {}, 0.0});
  rep.statuses.push_back({"ii", Status::SampledEvidence,
                          "graph of F(p_ref, .) is closed by representation (checked globally)", {}, 0.0});
  const PerturbationConstants k = estimate_perturbation_constants(prob, ConstantsMode::Uniform, cfg);
  rep.upper_lipschitz = k.l_F;
  rep.statuses.push_back(constant_status("iii", "upper Lipschitz constant", k.l_F, k.F_diverging, k.F_witness));
  rep.c = c_constant(prob, cfg.schedule);
  HypothesisStatus hc{"iv", Status::Holds, "", rep.c.witness, rep.c.value};
  if (rep.c.value >= cfg.positivity) {
    hc.detail = "c = " + fmt(rep.c.value) + " > 0";
  } else {
    hc.status = Status::Fails;
    hc.detail = "c = " + fmt(rep.c.value) + " is not positive";
  }
  rep.statuses.push_back(hc);
  if (any_fails(rep.statuses)) {
    rep.outcome = Outcome::Fails;
    return rep;
  }
  rep.calm = true;
  rep.outcome = Outcome::Holds;
  if (!cfg.validate) return rep;
  rep.oracle = empirical_modulus(solution_map(prob, cfg.x_step, cfg.resolved_solve_tol()), ModulusKind::Calm,
                                 cfg.oracle_grid(prob));
  if (!std::isfinite(rep.oracle->value)) rep.outcome = Outcome::Undetermined;
  return rep;
}

SmoothBaseReport check_calm_smooth_base(const GenEqProblem& prob, double gamma, const CheckConfig& cfg) {
  if (!prob.base().has_jacobian()) throw Unsupported("check_calm_smooth_base needs the x-Jacobian of the base");
  if (!prob.reference_graph()) throw ContractViolation("check_calm_smooth_base needs a graph representation");
  if (!(gamma > 0.0)) throw ContractViolation("gamma must be positive");
  cfg.schedule.validate();
  const GraphRep& graph = *prob.reference_graph();
  SmoothBaseReport rep;
  rep.gamma = gamma;
  const std::size_t dx = prob.dims().x, dy = prob.dims().y;
  for (int k = 0; k < cfg.schedule.levels; ++k) {
    const double eps = cfg.schedule.radius(k);
    std::vector<std::pair<Vector, Vector>> pts;
    for (auto& pt : sample_graph_points(prob, eps, cfg.schedule, k)) {
      const double gap = prob.y_metric().distance(prob.base()(prob.p_ref(), pt.first), pt.second);
      if (gap > 1e-12 && gap <= eps) pts.push_back(std::move(pt));
    }
    std::vector<double> sig(pts.size()), outer(pts.size());
    parallel_for(pts.size(), [&](std::size_t i) {
      const Matrix j = prob.base().jacobian(prob.p_ref(), pts[i].first);
      Eigen::MatrixXd m(dy, dx);
      for (std::size_t r = 0; r < dy; ++r) {
        for (std::size_t c = 0; c < dx; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c];
      }
      // inf over unit y* of |J^T y*| is the smallest singular value of J^T,
      // zero when J^T has a kernel.
      if (dy > dx) {
        sig[i] = 0.0;
      } else {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
        sig[i] = svd.singularValues().minCoeff();
      }
      outer[i] = outer_norm(graph, pts[i].first, pts[i].second, prob.x_metric(), prob.y_metric());
    });
    SmoothBaseLevel lvl{eps, pts.size(), kInf, 0.0, true, {}};
    double worst = kInf;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      lvl.min_singular = std::min(lvl.min_singular, sig[i]);
      lvl.max_outer = std::max(lvl.max_outer, outer[i]);
      const double margin = sig[i] - ((1.0 + gamma) * outer[i] + gamma);
      if (margin < worst) {
        worst = margin;
        lvl.witness = concat(pts[i].first, pts[i].second);
      }
      if (!(margin > 0.0)) lvl.pass = false;
    }
    if (lvl.pass) rep.holds = true;
    rep.levels.push_back(std::move(lvl));
  }
  rep.outcome = rep.holds ? Outcome::Holds : Outcome::Fails;
  return rep;
}

TrackerResult ekeland_track(const GenEqProblem& prob, const Vector& p, const TrackerConfig& cfg) {
  require_dim(p, prob.dims().p, "tracker parameter");
  if (!(cfg.c > 0.0)) throw ContractViolation("tracker needs c > 0");
  if (!(cfg.step_floor > 0.0) || !(cfg.step0 > cfg.step_floor)) throw ContractViolation("tracker step schedule is invalid");
  const double delta = cfg.delta_star > 0.0 ? cfg.delta_star : 0.5 * prob.x_region().radius();
  const Metric& xm = prob.x_metric();
  const auto dirs = unit_directions(xm, prob.dims().x, cfg.extra_dirs, cfg.seed);
  TrackerResult res;
  Vector x = prob.x_ref();
  double psi = displacement(prob, p, x);
  double step = cfg.step0;
  int it = 0;
  res.trace.push_back({0, psi, 0.0, step});
  while (psi > cfg.tol_solution) {
    if (it >= cfg.max_iterations) break;
    Vector best;
    double best_psi = psi;
    for (const auto& d : dirs) {
      const Vector z = axpy(x, step, d);
      if (xm.distance(z, prob.x_ref()) > delta) continue;
      const double pz = displacement(prob, p, z);
      if (pz <= psi - cfg.c * xm.distance(z, x) && pz < best_psi) {
        best_psi = pz;
        best = z;
      }
    }
    if (best.empty()) {
      step *= 0.5;
      if (step < cfg.step_floor) break;
      continue;
    }
    ++it;
    x = std::move(best);
    psi = best_psi;
    res.trace.push_back({it, psi, xm.distance(x, prob.x_ref()), step});
    step = std::min(cfg.step0, 2.0 * step);
  }
  if (psi > cfg.tol_solution) {
    std::ostringstream os;
    os << "tracker stalled after " << it << " iterations with psi = " << psi << " at step " << step;
    throw NoSolutionFound(os.str());
  }
  res.x = x;
  res.psi = psi;
  res.distance = xm.distance(x, prob.x_ref());
  res.iterations = it;
  if (cfg.lf_plus_lF) {
    res.distance_bound = *cfg.lf_plus_lF / cfg.c * prob.p_metric().distance(p, prob.p_ref()) + cfg.tol_solution;
    res.distance_ok = res.distance <= *res.distance_bound;
  }
  return res;
}

double default_track_radius(const GenEqProblem& prob, const CheckConfig& config) {
  CheckConfig cfg = config;
  cfg.validate = false;
  const LiplscReport rep = check_liplsc(prob, cfg);
  if (rep.outcome != Outcome::Holds || !(rep.zeta > 0.0)) return 0.4;
  return std::min(rep.zeta, 0.4);
}

std::vector<Vector> default_track_params(const GenEqProblem& prob, double radius) {
  std::vector<Vector> out;
  for (double t : {-1.0, -0.75, -0.5, -0.25, 0.25, 0.5, 0.75, 1.0}) {
    out.push_back(axpy(prob.p_ref(), t * radius, unit_vector(prob.dims().p, 0)));
  }
  return out;
}

}  // namespace varistab
