#include "varistab/run.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "varistab/catalog.hpp"
#include "varistab/errors.hpp"
#include "varistab/expr.hpp"
#include "varistab/optstab.hpp"
#include "varistab/slopes.hpp"
#include "varistab/stability.hpp"

namespace varistab {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

// ---------------------------------------------------------------- helpers

ojson num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

ojson vec(const Vector& v) {
  ojson a = ojson::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

ojson opt_num(const std::optional<double>& v) { return v ? num(*v) : ojson(nullptr); }

std::string cell(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string join_path(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  throw ConfigError("field '" + path + "': " + what);
}

void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
  if (!obj.is_object()) bad(path, "expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) bad(join_path(path, it.key()), "unknown key");
  }
}

double get_double(const json& obj, const std::string& key, double def, const std::string& path) {
  if (!obj.contains(key)) return def;
  const json& v = obj.at(key);
  if (!v.is_number()) bad(join_path(path, key), "expected a number");
  return v.get<double>();
}

long long get_int(const json& obj, const std::string& key, long long def, const std::string& path) {
  if (!obj.contains(key)) return def;
  const json& v = obj.at(key);
  if (!v.is_number_integer() && !v.is_number_unsigned()) bad(join_path(path, key), "expected an integer");
  return v.get<long long>();
}

std::string get_string(const json& obj, const std::string& key, const std::string& def, const std::string& path) {
  if (!obj.contains(key)) return def;
  const json& v = obj.at(key);
  if (!v.is_string()) bad(join_path(path, key), "expected a string");
  return v.get<std::string>();
}

Vector get_vector(const json& v, const std::string& path, std::size_t dim) {
  if (!v.is_array()) bad(path, "expected an array of numbers");
  Vector out;
  for (const auto& e : v) {
    if (!e.is_number()) bad(path, "expected an array of numbers");
    out.push_back(e.get<double>());
  }
  if (dim && out.size() != dim) bad(path, "expected " + std::to_string(dim) + " entries");
  return out;
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.contains(key)) bad(join_path(path, key), "missing required key");
  return obj.at(key);
}

Expr parse_expr(const json& v, const std::string& path, std::size_t np, std::size_t nx) {
  if (v.is_number()) return Expr::parse(std::to_string(v.get<double>()), np, nx);
  if (!v.is_string()) bad(path, "expected an expression string");
  try {
    return Expr::parse(v.get<std::string>(), np, nx);
  } catch (const ContractViolation& e) {
    bad(path, e.what());
  }
}

std::vector<Expr> parse_exprs(const json& v, const std::string& path, std::size_t np, std::size_t nx,
                              std::size_t dim) {
  if (!v.is_array()) bad(path, "expected an array of expressions");
  std::vector<Expr> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(parse_expr(v[i], path + "[" + std::to_string(i) + "]", np, nx));
  if (dim && out.size() != dim) bad(path, "expected " + std::to_string(dim) + " expressions");
  return out;
}

Region get_region(const json& obj, const std::string& key, const std::string& path, std::size_t dim) {
  const std::string p = join_path(path, key);
  const json& r = require(obj, key, path);
  check_keys(r, p, {"lo", "hi"});
  return {get_vector(require(r, "lo", p), p + ".lo", dim), get_vector(require(r, "hi", p), p + ".hi", dim)};
}

Vector eval_all(const std::vector<Expr>& es, const Vector& p, const Vector& x) {
  Vector out;
  for (const auto& e : es) out.push_back(e(p, x));
  return out;
}

// --------------------------------------------------------- inline instances

struct FieldDef {
  FieldFn fn;
  std::optional<GraphRep> graph;
};

FieldDef parse_field(const json& f, const std::string& path, const Dims& d) {
  const std::string type = get_string(f, "type", "", path);
  const std::size_t np = d.p, nx = d.x, ny = d.y;
  FieldDef out;
  if (type == "zero") {
    check_keys(f, path, {"type"});
    out.fn = [ny](const Vector&, const Vector&) { return ClosedSet::singleton(Vector(ny, 0.0)); };
    out.graph = zero_field_graph(nx, ny);
  } else if (type == "whole") {
    check_keys(f, path, {"type"});
    out.fn = [ny](const Vector&, const Vector&) { return ClosedSet::whole_space(ny); };
    out.graph = GraphRep::whole(nx, ny);
  } else if (type == "point") {
    check_keys(f, path, {"type", "at"});
    const auto at = parse_exprs(require(f, "at", path), path + ".at", np, nx, ny);
    out.fn = [at](const Vector& p, const Vector& x) { return ClosedSet::singleton(eval_all(at, p, x)); };
  } else if (type == "box") {
    check_keys(f, path, {"type", "lo", "hi"});
    auto bounds = [&](const char* key, double inf) {
      const json& v = require(f, key, path);
      const std::string p = join_path(path, key);
      if (!v.is_array() || v.size() != ny) bad(p, "expected " + std::to_string(ny) + " entries");
      std::vector<std::optional<Expr>> out;
      for (std::size_t i = 0; i < ny; ++i) {
        if (v[i].is_null()) out.emplace_back();
        else out.emplace_back(parse_expr(v[i], p + "[" + std::to_string(i) + "]", np, nx));
      }
      return std::make_pair(out, inf);
    };
    const auto lo = bounds("lo", -kInf), hi = bounds("hi", kInf);
    auto eval = [](const std::pair<std::vector<std::optional<Expr>>, double>& b, const Vector& p, const Vector& x) {
      Vector v;
      for (const auto& e : b.first) v.push_back(e ? (*e)(p, x) : b.second);
      return v;
    };
    out.fn = [lo, hi, eval](const Vector& p, const Vector& x) { return ClosedSet::box(eval(lo, p, x), eval(hi, p, x)); };
    // Constant bounds give a polyhedral graph.
    bool constant = true;
    for (const auto* b : {&lo, &hi}) {
      for (const auto& e : b->first) constant = constant && (!e || e->degree() == 0);
    }
    if (constant) {
      GraphPiece piece;
      const Vector zero_p(np, 0.0), zero_x(nx, 0.0);
      for (std::size_t i = 0; i < ny; ++i) {
        Vector a(nx + ny, 0.0);
        if (lo.first[i]) {
          a[nx + i] = -1.0;
          piece.constraints.push_back(GraphConstraint::affine(a, -(*lo.first[i])(zero_p, zero_x)));
        }
        if (hi.first[i]) {
          a[nx + i] = 1.0;
          piece.constraints.push_back(GraphConstraint::affine(a, (*hi.first[i])(zero_p, zero_x)));
        }
      }
      out.graph = GraphRep(nx, ny, {piece});
    }
  } else if (type == "outside_ball") {
    check_keys(f, path, {"type", "radius"});
    const Expr r = parse_expr(require(f, "radius", path), path + ".radius", np, nx);
    out.fn = [r, ny](const Vector& p, const Vector& x) { return ClosedSet::outside_ball(ny, std::abs(r(p, x))); };
  } else if (type == "ball") {
    check_keys(f, path, {"type", "center", "radius"});
    const auto c = parse_exprs(require(f, "center", path), path + ".center", np, nx, ny);
    const Expr r = parse_expr(require(f, "radius", path), path + ".radius", np, nx);
    out.fn = [c, r](const Vector& p, const Vector& x) { return ClosedSet::ball(eval_all(c, p, x), std::abs(r(p, x))); };
  } else {
    bad(join_path(path, "type"), "expected one of zero, whole, point, box, outside_ball, ball");
  }
  return out;
}

Dims parse_dims(const json& inst, const std::string& path, bool with_y) {
  const std::string p = join_path(path, "dims");
  const json& d = require(inst, "dims", path);
  check_keys(d, p, with_y ? std::set<std::string>{"p", "x", "y"} : std::set<std::string>{"p", "x", "h"});
  Dims out;
  out.p = static_cast<std::size_t>(get_int(d, "p", 1, p));
  out.x = static_cast<std::size_t>(get_int(d, "x", 1, p));
  out.y = static_cast<std::size_t>(get_int(d, with_y ? "y" : "h", 1, p));
  if (out.p == 0 || out.x == 0 || out.y == 0 || out.p > 8 || out.x > 8 || out.y > 8) bad(p, "dimensions must be in 1..8");
  return out;
}

CatalogEntry inline_geneq(const json& inst, const std::string& path) {
  check_keys(inst, path, {"kind", "name", "dims", "base", "field", "p_ref", "x_ref", "p_region", "x_region", "x_step"});
  const Dims d = parse_dims(inst, path, true);
  GenEqSpec s;
  s.name = get_string(inst, "name", "inline", path);
  s.dims = d;
  if (inst.contains("base")) {
    const auto rows = parse_exprs(inst.at("base"), join_path(path, "base"), d.p, d.x, d.y);
    s.base = BaseFn(d, [rows](const Vector& p, const Vector& x) { return eval_all(rows, p, x); },
                    [rows](const Vector& p, const Vector& x) { return expr_jacobian(rows, p, x); });
  }
  const std::string fp = join_path(path, "field");
  FieldDef f = parse_field(require(inst, "field", path), fp, d);
  s.field = f.fn;
  s.reference_graph = f.graph;
  s.p_ref = get_vector(require(inst, "p_ref", path), join_path(path, "p_ref"), d.p);
  s.x_ref = get_vector(require(inst, "x_ref", path), join_path(path, "x_ref"), d.x);
  s.p_region = get_region(inst, "p_region", path, d.p);
  s.x_region = get_region(inst, "x_region", path, d.x);
  CatalogEntry e;
  e.id = s.name;
  e.description = "inline generalized equation";
  try {
    e.geneq.emplace(std::move(s));
  } catch (const ContractViolation& ex) {
    bad(path, ex.what());
  }
  e.config.x_step = get_double(inst, "x_step", 0x1.0p-12, path);
  return e;
}

ClosedSet constant_set(const json& f, const std::string& path, std::size_t dim) {
  const std::string type = get_string(f, "type", "", path);
  if (type == "whole") {
    check_keys(f, path, {"type"});
    return ClosedSet::whole_space(dim);
  }
  if (type == "point") {
    check_keys(f, path, {"type", "at"});
    return ClosedSet::singleton(get_vector(require(f, "at", path), path + ".at", dim));
  }
  if (type == "box") {
    check_keys(f, path, {"type", "lo", "hi"});
    auto bound = [&](const char* key, double inf) {
      const json& v = require(f, key, path);
      if (!v.is_array() || v.size() != dim) bad(join_path(path, key), "expected " + std::to_string(dim) + " entries");
      Vector out;
      for (const auto& e : v) {
        if (e.is_null()) out.push_back(inf);
        else if (e.is_number()) out.push_back(e.get<double>());
        else bad(join_path(path, key), "expected numbers or null");
      }
      return out;
    };
    return ClosedSet::box(bound("lo", -kInf), bound("hi", kInf));
  }
  if (type == "ball") {
    check_keys(f, path, {"type", "center", "radius"});
    return ClosedSet::ball(get_vector(require(f, "center", path), path + ".center", dim),
                           get_double(f, "radius", 0.0, path));
  }
  bad(join_path(path, "type"), "expected one of whole, point, box, ball");
}

CatalogEntry inline_opt(const json& inst, const std::string& path) {
  check_keys(inst, path, {"kind", "name", "dims", "objective", "constraint", "C", "p_ref", "x_ref", "p_region",
                          "x_region", "x_step", "kappa"});
  const Dims d = parse_dims(inst, path, false);
  ParamOptSpec s;
  s.name = get_string(inst, "name", "inline", path);
  s.p_dim = d.p;
  s.x_dim = d.x;
  const Expr phi = parse_expr(require(inst, "objective", path), join_path(path, "objective"), d.p, d.x);
  s.objective = [phi](const Vector& p, const Vector& x) { return phi(p, x); };
  s.grad_x_objective = [phi](const Vector& p, const Vector& x) { return expr_jacobian({phi}, p, x)[0]; };
  if (inst.contains("constraint")) {
    s.h_dim = d.y;
    const auto rows = parse_exprs(inst.at("constraint"), join_path(path, "constraint"), d.p, d.x, d.y);
    s.constraint = [rows](const Vector& p, const Vector& x) { return eval_all(rows, p, x); };
    s.jac_x_constraint = [rows](const Vector& p, const Vector& x) { return expr_jacobian(rows, p, x); };
    s.C = constant_set(require(inst, "C", path), join_path(path, "C"), d.y);
  } else if (inst.contains("C")) {
    bad(join_path(path, "C"), "a constraint set needs a constraint map");
  }
  s.p_ref = get_vector(require(inst, "p_ref", path), join_path(path, "p_ref"), d.p);
  s.x_ref = get_vector(require(inst, "x_ref", path), join_path(path, "x_ref"), d.x);
  s.p_region = get_region(inst, "p_region", path, d.p);
  s.x_region = get_region(inst, "x_region", path, d.x);
  s.x_step = get_double(inst, "x_step", 0x1.0p-10, path);
  s.kappa = get_double(inst, "kappa", 0.0, path);
  CatalogEntry e;
  e.id = s.name;
  e.description = "inline optimization problem";
  try {
    e.opt.emplace(std::move(s));
  } catch (const ContractViolation& ex) {
    bad(path, ex.what());
  }
  e.config.x_step = e.opt->spec().x_step;
  return e;
}

CatalogEntry resolve_instance(const json& inst) {
  if (inst.is_string()) {
    try {
      return catalog_entry(inst.get<std::string>());
    } catch (const ContractViolation& e) {
      bad("instance", e.what());
    }
  }
  if (!inst.is_object()) bad("instance", "expected a catalog id or an inline definition");
  const std::string kind = get_string(inst, "kind", "", "instance");
  if (kind == "geneq") return inline_geneq(inst, "instance");
  if (kind == "opt") return inline_opt(inst, "instance");
  bad("instance.kind", "expected geneq or opt");
}

// ------------------------------------------------------------- settings

struct Settings {
  std::string command;
  std::uint64_t seed = 0;
  CheckConfig check;
  TrackerConfig tracker;
  std::vector<Vector> track_params;
  ModulusKind empirical_kind = ModulusKind::LipLsc;
  std::string empirical_source = "auto";
  std::vector<Vector> extra_points;
  std::string slope_target = "disp";
  double gamma = 0.5;
  std::string optstab_check = "all";
  ArgminVariant variant = ArgminVariant::Slope;
};

void apply_schedule(const json& cfg, Settings& s) {
  if (!cfg.contains("schedule")) return;
  const json& j = cfg.at("schedule");
  check_keys(j, "schedule", {"eps0", "decay", "levels", "samples_per_level"});
  auto& r = s.check.schedule;
  r.eps0 = get_double(j, "eps0", r.eps0, "schedule");
  r.decay = get_double(j, "decay", r.decay, "schedule");
  r.levels = static_cast<int>(get_int(j, "levels", r.levels, "schedule"));
  r.samples_per_level = static_cast<int>(get_int(j, "samples_per_level", r.samples_per_level, "schedule"));
  try {
    r.validate();
  } catch (const ContractViolation& e) {
    bad("schedule", e.what());
  }
}

void apply_grid(const json& cfg, Settings& s) {
  if (!cfg.contains("grid")) return;
  const json& j = cfg.at("grid");
  check_keys(j, "grid", {"x_step", "p_r0", "p_ratio", "p_scales", "p_extra_dirs", "calm_delta", "delta_star",
                         "solve_tol", "positivity", "slack", "validate"});
  auto& c = s.check;
  c.x_step = get_double(j, "x_step", c.x_step, "grid");
  c.p_r0 = get_double(j, "p_r0", c.p_r0, "grid");
  c.p_ratio = get_double(j, "p_ratio", c.p_ratio, "grid");
  c.p_scales = static_cast<int>(get_int(j, "p_scales", c.p_scales, "grid"));
  c.p_extra_dirs = static_cast<std::size_t>(get_int(j, "p_extra_dirs", static_cast<long long>(c.p_extra_dirs), "grid"));
  c.calm_delta = get_double(j, "calm_delta", c.calm_delta, "grid");
  c.delta_star = get_double(j, "delta_star", c.delta_star, "grid");
  c.solve_tol = get_double(j, "solve_tol", c.solve_tol, "grid");
  c.positivity = get_double(j, "positivity", c.positivity, "grid");
  c.slack = get_double(j, "slack", c.slack, "grid");
  if (j.contains("validate")) {
    if (!j.at("validate").is_boolean()) bad("grid.validate", "expected a boolean");
    c.validate = j.at("validate").get<bool>();
  }
  if (!(c.x_step > 0.0)) bad("grid.x_step", "must be positive");
  if (!(c.p_r0 > 0.0)) bad("grid.p_r0", "must be positive");
  if (!(c.p_ratio > 0.0 && c.p_ratio < 1.0)) bad("grid.p_ratio", "must lie in (0, 1)");
  if (c.p_scales < 1) bad("grid.p_scales", "must be at least 1");
}

std::vector<Vector> param_list(const json& v, const std::string& path, std::size_t dim) {
  if (!v.is_array()) bad(path, "expected an array");
  std::vector<Vector> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    if (v[i].is_number()) {
      if (dim != 1) bad(p, "expected an array of " + std::to_string(dim) + " numbers");
      out.push_back({v[i].get<double>()});
    } else {
      out.push_back(get_vector(v[i], p, dim));
    }
  }
  return out;
}

Settings parse_settings(const json& cfg, const RunOptions& opts, const CatalogEntry* entry) {
  Settings s;
  if (entry) s.check = entry->config;
  s.command = opts.command ? *opts.command : get_string(cfg, "command", "", "");
  s.seed = opts.seed ? *opts.seed : static_cast<std::uint64_t>(get_int(cfg, "seed", 0, ""));
  apply_schedule(cfg, s);
  apply_grid(cfg, s);
  s.check.seed = s.seed;
  s.check.schedule.seed = s.seed;
  const std::size_t np = entry ? (entry->geneq ? entry->geneq->dims().p : entry->opt->spec().p_dim) : 1;

  if (cfg.contains("tracker")) {
    const json& j = cfg.at("tracker");
    check_keys(j, "tracker", {"c", "step0", "step_floor", "max_iterations", "tol_solution", "delta_star", "extra_dirs",
                              "lf_plus_lF", "params"});
    auto& t = s.tracker;
    t.c = get_double(j, "c", t.c, "tracker");
    t.step0 = get_double(j, "step0", t.step0, "tracker");
    t.step_floor = get_double(j, "step_floor", t.step_floor, "tracker");
    t.max_iterations = static_cast<int>(get_int(j, "max_iterations", t.max_iterations, "tracker"));
    t.tol_solution = get_double(j, "tol_solution", t.tol_solution, "tracker");
    t.delta_star = get_double(j, "delta_star", t.delta_star, "tracker");
    t.extra_dirs = static_cast<std::size_t>(get_int(j, "extra_dirs", static_cast<long long>(t.extra_dirs), "tracker"));
    if (j.contains("lf_plus_lF")) t.lf_plus_lF = get_double(j, "lf_plus_lF", 0.0, "tracker");
    if (j.contains("params")) s.track_params = param_list(j.at("params"), "tracker.params", np);
  }
  s.tracker.seed = s.seed;
  if (cfg.contains("empirical")) {
    const json& j = cfg.at("empirical");
    check_keys(j, "empirical", {"kind", "source", "extra_points"});
    const std::string kind = get_string(j, "kind", "liplsc", "empirical");
    if (kind == "liplsc") s.empirical_kind = ModulusKind::LipLsc;
    else if (kind == "calm") s.empirical_kind = ModulusKind::Calm;
    else if (kind == "upper_lipschitz") s.empirical_kind = ModulusKind::UpperLipschitz;
    else if (kind == "aubin") s.empirical_kind = ModulusKind::Aubin;
    else bad("empirical.kind", "expected liplsc, calm, upper_lipschitz or aubin");
    s.empirical_source = get_string(j, "source", "auto", "empirical");
    if (s.empirical_source != "auto" && s.empirical_source != "exact" && s.empirical_source != "grid") {
      bad("empirical.source", "expected auto, exact or grid");
    }
    if (j.contains("extra_points")) s.extra_points = param_list(j.at("extra_points"), "empirical.extra_points", np);
  }
  if (cfg.contains("slope")) {
    const json& j = cfg.at("slope");
    check_keys(j, "slope", {"target"});
    s.slope_target = get_string(j, "target", "disp", "slope");
    if (s.slope_target != "disp" && s.slope_target != "psi" && s.slope_target != "strong") {
      bad("slope.target", "expected disp, psi or strong");
    }
  }
  if (cfg.contains("smooth")) {
    const json& j = cfg.at("smooth");
    check_keys(j, "smooth", {"gamma"});
    s.gamma = get_double(j, "gamma", s.gamma, "smooth");
  }
  if (cfg.contains("optstab")) {
    const json& j = cfg.at("optstab");
    check_keys(j, "optstab", {"check", "variant"});
    s.optstab_check = get_string(j, "check", "all", "optstab");
    static const std::set<std::string> checks{"all", "argmin", "P1", "P2", "P3", "P4", "problem_calmness"};
    if (!checks.count(s.optstab_check)) bad("optstab.check", "expected all, argmin, P1, P2, P3, P4 or problem_calmness");
    const std::string v = get_string(j, "variant", "slope", "optstab");
    if (v == "slope") s.variant = ArgminVariant::Slope;
    else if (v == "subdifferential") s.variant = ArgminVariant::Subdifferential;
    else if (v == "smooth") s.variant = ArgminVariant::Smooth;
    else bad("optstab.variant", "expected slope, subdifferential or smooth");
  }
  return s;
}

// ------------------------------------------------------------ serializers

ojson to_json(const HypothesisStatus& h) {
  return ojson{{"id", h.id}, {"status", to_string(h.status)}, {"detail", h.detail}, {"value", num(h.value)},
               {"witness", vec(h.witness)}};
}

ojson to_json(const std::vector<HypothesisStatus>& v) {
  ojson a = ojson::array();
  for (const auto& h : v) a.push_back(to_json(h));
  return a;
}

ojson to_json(const SlopeEstimate& s) {
  ojson levels = ojson::array();
  for (std::size_t k = 0; k < s.levels.size(); ++k) {
    levels.push_back(ojson{{"level", k}, {"epsilon", num(s.radii[k])}, {"value", num(s.levels[k])}});
  }
  return ojson{{"value", num(s.value)},         {"monotone", s.monotone}, {"local_min", s.local_min},
               {"empty_level", s.empty_level}, {"witness", vec(s.witness)}, {"levels", levels}};
}

ojson to_json(const Quotient& q) {
  return ojson{{"p", vec(q.p)}, {"p2", vec(q.p2)}, {"x", vec(q.x)}, {"scale", q.scale}, {"value", num(q.value)}};
}

ojson to_json(const EmpiricalEstimate& e) {
  ojson scales = ojson::array();
  for (std::size_t k = 0; k < e.scale_radius.size(); ++k) {
    scales.push_back(ojson{{"radius", num(e.scale_radius[k])}, {"sup", num(e.scale_value[k])}});
  }
  return ojson{{"kind", to_string(e.kind)},  {"value", num(e.value)},      {"diverging", e.diverging},
               {"x_step", num(e.x_step)},    {"delta", num(e.delta)},      {"scales", scales},
               {"witness", to_json(e.witness)}, {"quotient_count", e.quotients.size()}};
}

ojson to_json(const Verdict& v) {
  return ojson{{"pass", v.pass},
               {"bound", num(v.bound)},
               {"empirical", num(v.empirical)},
               {"threshold", num(v.threshold)},
               {"witness", to_json(v.witness)}};
}

ojson to_json(const PerturbationConstants& k) {
  ojson scales = ojson::array();
  for (std::size_t i = 0; i < k.scale_radius.size(); ++i) {
    scales.push_back(ojson{{"radius", num(k.scale_radius[i])}, {"f", num(k.f_trace[i])}, {"F", num(k.F_trace[i])}});
  }
  return ojson{{"mode", k.mode == ConstantsMode::Pointwise ? "pointwise" : "uniform"},
               {"l_f", num(k.l_f)},
               {"l_F", num(k.l_F)},
               {"f_diverging", k.f_diverging},
               {"F_diverging", k.F_diverging},
               {"f_witness", vec(k.f_witness)},
               {"F_witness", vec(k.F_witness)},
               {"scales", scales}};
}

CsvTable slope_csv(const SlopeEstimate& s) {
  CsvTable t{"slope", {"level", "epsilon", "inf_slope"}, {}};
  for (std::size_t k = 0; k < s.levels.size(); ++k) t.rows.push_back({std::to_string(k), cell(s.radii[k]), cell(s.levels[k])});
  return t;
}

CsvTable quotient_csv(const EmpiricalEstimate& e, std::size_t np, std::size_t nx) {
  CsvTable t{"quotients", {"scale"}, {}};
  const bool pairs = e.kind == ModulusKind::Aubin;
  for (std::size_t i = 0; i < np; ++i) t.header.push_back("p" + std::to_string(i + 1));
  if (pairs) {
    for (std::size_t i = 0; i < np; ++i) t.header.push_back("q" + std::to_string(i + 1));
  }
  for (std::size_t i = 0; i < nx; ++i) t.header.push_back("x" + std::to_string(i + 1));
  t.header.push_back("value");
  for (const auto& q : e.quotients) {
    std::vector<std::string> row{std::to_string(q.scale)};
    for (std::size_t i = 0; i < np; ++i) row.push_back(cell(q.p[i]));
    if (pairs) {
      for (std::size_t i = 0; i < np; ++i) row.push_back(cell(q.p2[i]));
    }
    for (std::size_t i = 0; i < nx; ++i) row.push_back(i < q.x.size() ? cell(q.x[i]) : "");
    row.push_back(cell(q.value));
    t.rows.push_back(std::move(row));
  }
  return t;
}

int exit_code(Outcome o) {
  switch (o) {
    case Outcome::Holds: return 0;
    case Outcome::Fails: return 2;
    case Outcome::Undetermined: return 3;
  }
  return 1;
}

// --------------------------------------------------------------- commands

struct CommandResult {
  ojson result;
  Outcome outcome = Outcome::Holds;
  std::vector<CsvTable> csv;
};

const GenEqProblem& need_geneq(const CatalogEntry& e, std::optional<GenEqProblem>& storage) {
  if (e.geneq) return *e.geneq;
  if (e.opt) {
    storage.emplace(argmin_generalized_equation(*e.opt));
    return *storage;
  }
  throw ConfigError("field 'instance': the command needs a generalized equation");
}

CommandResult cmd_catalog() {
  CommandResult r;
  ojson list = ojson::array();
  for (const auto& id : catalog_ids()) {
    const CatalogEntry e = catalog_entry(id);
    list.push_back(ojson{{"id", e.id},
                         {"builtin", e.builtin},
                         {"kind", e.geneq ? "geneq" : "opt"},
                         {"description", e.description}});
  }
  r.result = ojson{{"builtins", builtin_ids()}, {"instances", list}};
  return r;
}

CommandResult cmd_slope(const GenEqProblem& prob, const Settings& s) {
  CommandResult r;
  SlopeEstimate est;
  if (s.slope_target == "disp") {
    est = strict_outer_slope(graph_displacement_map(prob), concat(prob.x_ref(), prob.y_ref()), s.check.schedule);
  } else if (s.slope_target == "psi") {
    BivariateMap psi{[&prob](const Vector& p, const Vector& x) { return displacement(prob, p, x); }, prob.p_metric(),
                     prob.x_metric(), prob.dims().p, prob.dims().x};
    est = partial_strict_outer_slope_x(psi, prob.p_ref(), prob.x_ref(), s.check.schedule);
  } else {
    ScalarMap g{[&prob](const Vector& x) { return displacement(prob, prob.p_ref(), x); }, prob.x_metric(),
                prob.dims().x, {}};
    est = strong_slope(g, prob.x_ref(), s.check.schedule);
  }
  r.result = ojson{{"target", s.slope_target}, {"slope", to_json(est)}};
  r.outcome = est.value >= s.check.positivity ? Outcome::Holds : Outcome::Fails;
  r.csv.push_back(slope_csv(est));
  return r;
}

CommandResult cmd_liplsc(const GenEqProblem& prob, const Settings& s) {
  CommandResult r;
  const LiplscReport rep = check_liplsc(prob, s.check);
  ojson validation = ojson::array();
  for (const auto& v : rep.validation) {
    validation.push_back(ojson{{"p", vec(v.p)}, {"distance", num(v.distance)}, {"allowed", num(v.allowed)}, {"pass", v.pass}});
  }
  r.result = ojson{{"hypotheses", to_json(rep.statuses)},
                   {"constants", to_json(rep.constants)},
                   {"slope", to_json(rep.slope)},
                   {"bound", opt_num(rep.bound)},
                   {"zeta", num(rep.zeta)},
                   {"validation", validation},
                   {"validation_pass", rep.validation_pass},
                   {"oracle", rep.oracle ? to_json(*rep.oracle) : ojson(nullptr)},
                   {"verdict", rep.verdict ? to_json(*rep.verdict) : ojson(nullptr)}};
  r.outcome = rep.outcome;
  r.csv.push_back(slope_csv(rep.slope));
  if (rep.oracle) r.csv.push_back(quotient_csv(*rep.oracle, prob.dims().p, prob.dims().x));
  return r;
}

CommandResult cmd_calm(const GenEqProblem& prob, const Settings& s) {
  CommandResult r;
  const CalmReport rep = check_calm(prob, s.check);
  r.result = ojson{{"hypotheses", to_json(rep.statuses)},
                   {"constants", to_json(rep.constants)},
                   {"slope", to_json(rep.slope)},
                   {"bound", opt_num(rep.bound)},
                   {"oracle", rep.oracle ? to_json(*rep.oracle) : ojson(nullptr)},
                   {"verdict", rep.verdict ? to_json(*rep.verdict) : ojson(nullptr)}};
  r.outcome = rep.outcome;
  r.csv.push_back(slope_csv(rep.slope));
  if (rep.oracle) r.csv.push_back(quotient_csv(*rep.oracle, prob.dims().p, prob.dims().x));
  return r;
}

CommandResult cmd_calm_coderivative(const GenEqProblem& prob, const Settings& s) {
  CommandResult r;
  const CoderivativeCalmReport rep = check_calm_coderivative(prob, s.check);
  ojson levels = ojson::array();
  for (double v : rep.c.levels) levels.push_back(num(v));
  r.result = ojson{{"hypotheses", to_json(rep.statuses)},
                   {"upper_lipschitz", num(rep.upper_lipschitz)},
                   {"c", ojson{{"value", num(rep.c.value)},
                               {"levels", levels},
                               {"sampled_points", rep.c.sampled_points},
                               {"witness", vec(rep.c.witness)}}},
                   {"calm", rep.calm},
                   {"oracle", rep.oracle ? to_json(*rep.oracle) : ojson(nullptr)}};
  r.outcome = rep.outcome;
  if (rep.oracle) r.csv.push_back(quotient_csv(*rep.oracle, prob.dims().p, prob.dims().x));
  return r;
}

CommandResult cmd_calm_smooth(const GenEqProblem& prob, const Settings& s) {
  CommandResult r;
  const SmoothBaseReport rep = check_calm_smooth_base(prob, s.gamma, s.check);
  ojson levels = ojson::array();
  CsvTable t{"smooth_levels", {"level", "epsilon", "points", "min_singular", "max_outer", "pass"}, {}};
  for (std::size_t k = 0; k < rep.levels.size(); ++k) {
    const auto& l = rep.levels[k];
    levels.push_back(ojson{{"epsilon", num(l.eps)},
                           {"points", l.points},
                           {"min_singular", num(l.min_singular)},
                           {"max_outer", num(l.max_outer)},
                           {"pass", l.pass},
                           {"witness", vec(l.witness)}});
    t.rows.push_back({std::to_string(k), cell(l.eps), std::to_string(l.points), cell(l.min_singular), cell(l.max_outer),
                      l.pass ? "1" : "0"});
  }
  r.result = ojson{{"gamma", num(rep.gamma)}, {"holds", rep.holds}, {"levels", levels}};
  r.outcome = rep.outcome;
  r.csv.push_back(std::move(t));
  return r;
}

CommandResult cmd_track(const GenEqProblem& prob, const Settings& s) {
  CommandResult r;
  TrackerConfig tc = s.tracker;
  if (!tc.lf_plus_lF) {
    const PerturbationConstants k = estimate_perturbation_constants(prob, ConstantsMode::Pointwise, s.check);
    if (std::isfinite(k.l_f + k.l_F)) tc.lf_plus_lF = k.l_f + k.l_F;
  }
  std::vector<Vector> params = s.track_params;
  double radius = 0.0;
  if (params.empty()) {
    radius = default_track_radius(prob, s.check);
    params = default_track_params(prob, radius);
  }
  CsvTable t{"trace", {"run", "iteration", "psi", "distance", "step"}, {}};
  ojson runs = ojson::array();
  for (std::size_t i = 0; i < params.size(); ++i) {
    try {
      const TrackerResult res = ekeland_track(prob, params[i], tc);
      runs.push_back(ojson{{"p", vec(params[i])},
                           {"solved", true},
                           {"x", vec(res.x)},
                           {"psi", num(res.psi)},
                           {"distance", num(res.distance)},
                           {"iterations", res.iterations},
                           {"distance_bound", opt_num(res.distance_bound)},
                           {"distance_ok", res.distance_ok}});
      if (!res.distance_ok) r.outcome = Outcome::Fails;
      for (const auto& st : res.trace) {
        t.rows.push_back({std::to_string(i), std::to_string(st.iteration), cell(st.psi), cell(st.distance), cell(st.step)});
      }
    } catch (const NoSolutionFound& e) {
      runs.push_back(ojson{{"p", vec(params[i])}, {"solved", false}, {"error", e.what()}});
      r.outcome = Outcome::Fails;
    }
  }
  r.result = ojson{{"c", num(tc.c)}, {"lf_plus_lF", opt_num(tc.lf_plus_lF)}, {"radius", num(radius)}, {"runs", runs}};
  r.csv.push_back(std::move(t));
  return r;
}

CommandResult cmd_empirical(const CatalogEntry& e, const GenEqProblem* prob, const Settings& s) {
  CommandResult r;
  const bool exact = e.mapping && s.empirical_source != "grid";
  if (s.empirical_source == "exact" && !e.mapping) {
    throw ConfigError("field 'empirical.source': instance has no closed-form solution mapping");
  }
  SetValuedMap map;
  OracleGrid grid;
  if (exact) {
    map = *e.mapping;
    map.p_dim = prob->dims().p;
    map.p_metric = prob->p_metric();
    map.x_metric = prob->x_metric();
    grid = s.check.oracle_grid(*prob);
    grid.scales = s.check.p_scales;
  } else {
    map = solution_map(*prob, s.check.x_step, s.check.resolved_solve_tol());
    grid = s.check.oracle_grid(*prob);
  }
  grid.extra_points = s.extra_points;
  const EmpiricalEstimate est = empirical_modulus(map, s.empirical_kind, grid);
  r.result = ojson{{"source", exact ? "exact" : "grid"}, {"estimate", to_json(est)}};
  r.outcome = std::isfinite(est.value) ? Outcome::Holds : Outcome::Fails;
  r.csv.push_back(quotient_csv(est, map.p_dim, map.x_dim));
  return r;
}

ojson to_json(const PropReport& p) {
  return ojson{{"which", to_string(p.which)},
               {"hypotheses", to_json(p.hypotheses)},
               {"hypotheses_hold", p.hypotheses_hold},
               {"conclusion", to_json(p.conclusion)},
               {"quantitative_bound", opt_num(p.quantitative_bound)},
               {"quantitative_value", opt_num(p.quantitative_value)},
               {"quantitative_ok", p.quantitative_ok},
               {"bug", p.bug},
               {"outcome", to_string(p.outcome)}};
}

ojson to_json(const ArgminReport& a) {
  ojson liplsc = nullptr;
  if (a.liplsc) {
    liplsc = ojson{{"hypotheses", to_json(a.liplsc->statuses)},
                   {"constants", to_json(a.liplsc->constants)},
                   {"slope", to_json(a.liplsc->slope)},
                   {"bound", opt_num(a.liplsc->bound)},
                   {"validation_pass", a.liplsc->validation_pass},
                   {"outcome", to_string(a.liplsc->outcome)}};
  }
  return ojson{{"variant", to_string(a.variant)},
               {"hypotheses", to_json(a.hypotheses)},
               {"kappa", num(a.kappa)},
               {"slope", num(a.slope)},
               {"liplsc", liplsc},
               {"oracle", a.oracle ? to_json(*a.oracle) : ojson(nullptr)},
               {"verdict", a.verdict ? to_json(*a.verdict) : ojson(nullptr)},
               {"argmin_matches", a.argmin_matches},
               {"outcome", to_string(a.outcome)}};
}

CommandResult cmd_optstab(const CatalogEntry& e, const Settings& s) {
  if (!e.opt) throw ConfigError("field 'instance': optstab needs an optimization problem");
  const ParamOptProblem& prob = *e.opt;
  CommandResult r;
  r.result = ojson::object();
  const auto& sp = prob.spec();
  const ValueResult v0 = prob.value(sp.p_ref);
  r.result["value_at_reference"] = num(v0.value);
  r.result["objective_at_reference"] = num(sp.objective(sp.p_ref, sp.x_ref));
  r.result["kappa"] = num(prob.kappa());
  const std::string& which = s.optstab_check;
  auto want = [&](const char* name) { return which == "all" || which == name; };
  bool bug = false;
  if (want("problem_calmness")) {
    try {
      const ProblemCalmResult pc = problem_calmness(prob, s.check.calm_delta, s.check);
      ojson trace = ojson::array();
      for (std::size_t k = 0; k < pc.trace.size(); ++k) {
        trace.push_back(ojson{{"radius", num(pc.radii[k])}, {"inf", num(pc.trace[k])}});
      }
      r.result["problem_calmness"] = ojson{{"calm", pc.calm},
                                           {"inf_quotient", num(pc.inf_quotient)},
                                           {"witness_p", vec(pc.witness_p)},
                                           {"witness_x", vec(pc.witness_x)},
                                           {"scales", trace}};
      if (which != "all") r.outcome = pc.calm ? Outcome::Holds : Outcome::Fails;
    } catch (const ContractViolation& ex) {
      r.result["problem_calmness"] = ojson{{"error", ex.what()}};
      if (which != "all") r.outcome = Outcome::Undetermined;
    }
  }
  ojson props = ojson::array();
  const std::pair<const char*, ValueProp> all_props[] = {
      {"P1", ValueProp::P1}, {"P2", ValueProp::P2}, {"P3", ValueProp::P3}, {"P4", ValueProp::P4}};
  for (const auto& [name, prop] : all_props) {
    if (!want(name)) continue;
    const PropReport rep = check_value_function_props(prob, prop, s.check);
    bug = bug || rep.bug;
    props.push_back(to_json(rep));
    if (which != "all") r.outcome = rep.outcome;
  }
  if (!props.empty()) r.result["propositions"] = props;
  if (want("argmin")) {
    try {
      const ArgminReport a = check_argmin_liplsc(prob, s.variant, s.check);
      r.result["argmin"] = to_json(a);
      if (a.oracle) r.csv.push_back(quotient_csv(*a.oracle, sp.p_dim, sp.x_dim));
      if (which != "all") r.outcome = a.outcome;
    } catch (const Unsupported& ex) {
      r.result["argmin"] = ojson{{"error", ex.what()}};
      if (which != "all") throw;
    }
  }
  // The combined run holds unless a proposition is contradicted.
  if (which == "all") r.outcome = bug ? Outcome::Undetermined : Outcome::Holds;
  r.result["implication_violated"] = bug;
  return r;
}

// ------------------------------------------------------------------- text

void render(const ojson& j, const std::string& indent, std::ostringstream& os) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const ojson& v = it.value();
    const std::string key = j.is_object() ? it.key() : "-";
    if (v.is_object() && v.contains("id") && v.contains("status")) {
      os << indent << "(" << v["id"].get<std::string>() << ") " << v["status"].get<std::string>() << ": "
         << v["detail"].get<std::string>() << "\n";
    } else if (v.is_object()) {
      if (v.empty()) continue;
      os << indent << key << ":\n";
      render(v, indent + "  ", os);
    } else if (v.is_array() && !v.empty() && v.front().is_structured()) {
      os << indent << key << ":\n";
      render(v, indent + "  ", os);
    } else {
      os << indent << key << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
    }
  }
}

std::string render_text(const ojson& report) {
  std::ostringstream os;
  os << "varistab " << report["version"].get<std::string>() << "\n";
  os << "command: " << report["command"].get<std::string>() << "\n";
  if (report.contains("instance")) os << "instance: " << report["instance"].get<std::string>() << "\n";
  os << "seed: " << report["seed"].dump() << "\n";
  os << "outcome: " << report["outcome"].get<std::string>() << " (exit " << report["exit_code"].dump() << ")\n";
  render(report["result"], "  ", os);
  return os.str();
}

ojson config_echo(const Settings& s) {
  const auto& c = s.check;
  return ojson{{"schedule", ojson{{"eps0", num(c.schedule.eps0)},
                                  {"decay", num(c.schedule.decay)},
                                  {"levels", c.schedule.levels},
                                  {"samples_per_level", c.schedule.samples_per_level}}},
               {"grid", ojson{{"x_step", num(c.x_step)},
                              {"p_r0", num(c.p_r0)},
                              {"p_ratio", num(c.p_ratio)},
                              {"p_scales", c.p_scales},
                              {"p_extra_dirs", c.p_extra_dirs},
                              {"calm_delta", num(c.calm_delta)},
                              {"delta_star", num(c.delta_star)},
                              {"solve_tol", num(c.resolved_solve_tol())},
                              {"positivity", num(c.positivity)},
                              {"slack", num(c.slack)}}}};
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> v = {"slope",      "check-liplsc",         "check-calm",
                                             "check-calm-coderivative", "check-calm-smooth", "track",
                                             "empirical",  "optstab",              "catalog"};
  return v;
}

RunReport run_config(const json& cfg, const RunOptions& opts) {
  check_keys(cfg, "", {"schema", "command", "instance", "seed", "schedule", "grid", "tracker", "empirical", "slope",
                       "smooth", "optstab"});
  if (!cfg.contains("schema")) bad("schema", "missing required key");
  if (get_int(cfg, "schema", 0, "") != kSchemaVersion) bad("schema", "unsupported schema version (expected 1)");
  const std::string command = opts.command ? *opts.command : get_string(cfg, "command", "", "");
  if (command.empty()) bad("command", "missing required key");
  if (std::find(command_names().begin(), command_names().end(), command) == command_names().end()) {
    bad("command", "unknown command '" + command + "'");
  }

  std::optional<CatalogEntry> entry;
  if (command != "catalog") {
    if (!cfg.contains("instance")) bad("instance", "missing required key");
    entry = resolve_instance(cfg.at("instance"));
  }
  const Settings s = parse_settings(cfg, opts, entry ? &*entry : nullptr);

  CommandResult res;
  std::optional<GenEqProblem> storage;
  if (command == "catalog") {
    res = cmd_catalog();
  } else if (command == "optstab") {
    res = cmd_optstab(*entry, s);
  } else {
    const GenEqProblem& prob = need_geneq(*entry, storage);
    Settings local = s;
    if (storage && !cfg.contains("grid")) local.check = argmin_check_config(*entry->opt, local.check);
    if (command == "slope") res = cmd_slope(prob, local);
    else if (command == "check-liplsc") res = cmd_liplsc(prob, local);
    else if (command == "check-calm") res = cmd_calm(prob, local);
    else if (command == "check-calm-coderivative") res = cmd_calm_coderivative(prob, local);
    else if (command == "check-calm-smooth") res = cmd_calm_smooth(prob, local);
    else if (command == "track") res = cmd_track(prob, local);
    else res = cmd_empirical(*entry, &prob, local);
  }

  RunReport rep;
  rep.exit_code = exit_code(res.outcome);
  ojson j;
  j["schema"] = kSchemaVersion;
  j["toolkit"] = "varistab";
  j["version"] = kToolkitVersion;
  j["command"] = command;
  if (entry) j["instance"] = entry->id;
  j["seed"] = s.seed;
  j["config"] = config_echo(s);
  j["outcome"] = to_string(res.outcome);
  j["exit_code"] = rep.exit_code;
  j["result"] = std::move(res.result);
  rep.json = std::move(j);
  rep.text = render_text(rep.json);
  rep.csv = std::move(res.csv);
  return rep;
}

RunReport run_config_file(const std::string& path, const RunOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  json cfg;
  try {
    cfg = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError(path + ":" + std::to_string(line) + ":" + std::to_string(col) + ": JSON syntax error");
  }
  return run_config(cfg, opts);
}

std::string to_csv(const CsvTable& t) {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
  return out;
}

void emit_report(const RunReport& report, const std::string& dir, const std::string& format) {
  if (format != "text" && format != "json" && format != "csv" && format != "all") {
    throw ConfigError("--format must be one of text, json, csv, all");
  }
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
  auto write = [&](const std::string& name, const std::string& content) {
    const fs::path p = fs::path(dir) / name;
    std::ofstream out(p, std::ios::binary);
    out << content;
    out.close();
    if (!out) throw IoError("cannot write '" + p.string() + "'");
  };
  if (format == "text" || format == "all") write("report.txt", report.text);
  if (format == "json" || format == "all") write("report.json", report.json.dump(2) + "\n");
  if (format == "csv" || format == "all") {
    for (const auto& t : report.csv) write(t.name + ".csv", to_csv(t));
  }
}

}  // namespace varistab
