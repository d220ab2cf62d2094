#include "varistab/catalog.hpp"

#include <cmath>

#include "varistab/errors.hpp"

namespace varistab {

GraphRep zero_field_graph(std::size_t dx, std::size_t dy) {
  GraphPiece piece;
  for (std::size_t i = 0; i < dy; ++i) {
    Vector a(dx + dy, 0.0);
    a[dx + i] = 1.0;
    piece.constraints.push_back(GraphConstraint::affine(a, 0.0));
    a[dx + i] = -1.0;
    piece.constraints.push_back(GraphConstraint::affine(a, 0.0));
  }
  return GraphRep(dx, dy, {piece});
}

namespace {

constexpr double kStep1d = 0x1.0p-12;

Region interval(double lo, double hi) { return {{lo}, {hi}}; }

CheckConfig config_1d() {
  CheckConfig c;
  c.x_step = kStep1d;
  return c;
}

SetValuedMap exact_map(std::function<ClosedSet(const Vector&)> value, Region x_region, double step) {
  SetValuedMap m;
  m.value = std::move(value);
  m.x_dim = x_region.lo.size();
  m.x_region = std::move(x_region);
  m.x_step = step;
  return m;
}

GenEqSpec spec_1d(std::string name) {
  GenEqSpec s;
  s.name = std::move(name);
  s.dims = {1, 1, 1};
  s.p_ref = {0.0};
  s.x_ref = {0.0};
  s.p_region = interval(-0.5, 0.5);
  s.x_region = interval(-1.0, 1.0);
  return s;
}

ClosedSet zero1() { return ClosedSet::singleton({0.0}); }

CatalogEntry sqrt_epigraph() {
  GenEqSpec s = spec_1d("sqrt_epigraph");
  s.base = BaseFn(s.dims, [](const Vector&, const Vector& x) { return x; }, [](const Vector&, const Vector&) {
    return Matrix{{1.0}};
  });
  s.field = [](const Vector& p, const Vector&) { return ClosedSet::box({std::sqrt(std::abs(p[0]))}, {kInf}); };
  s.reference_graph = GraphRep(1, 1, {GraphPiece{{GraphConstraint::affine({0.0, -1.0}, 0.0)}}});
  CatalogEntry e;
  e.id = "sqrt_epigraph";
  e.description = "epigraph of sqrt|p|: f(p,x) = x, F(p,x) = [sqrt|p|, inf); lower semicontinuous, not Lipschitz lsc";
  e.builtin = true;
  e.geneq.emplace(std::move(s));
  e.mapping = exact_map([](const Vector& p) { return ClosedSet::box({std::sqrt(std::abs(p[0]))}, {kInf}); },
                        interval(-1.0, 2.0), kStep1d);
  e.config = config_1d();
  e.expect_liplsc = Outcome::Fails;
  return e;
}

ClosedSet halfline_jump_value(const Vector& p) {
  if (p[0] == 0.0) return ClosedSet::box({0.0}, {kInf});
  return ClosedSet::set_union({ClosedSet::box({-kInf}, {-1.0}), zero1()}, 1);
}

CatalogEntry halfline_jump() {
  GenEqSpec s = spec_1d("halfline_jump");
  s.x_region = interval(-2.0, 2.0);
  s.base = BaseFn(s.dims, [](const Vector&, const Vector& x) { return x; }, [](const Vector&, const Vector&) {
    return Matrix{{1.0}};
  });
  s.field = [](const Vector& p, const Vector&) { return halfline_jump_value(p); };
  s.reference_graph = GraphRep(1, 1, {GraphPiece{{GraphConstraint::affine({0.0, -1.0}, 0.0)}}});
  CatalogEntry e;
  e.id = "halfline_jump";
  e.description = "Phi(0) = [0, inf), Phi(p) = (-inf, -1] u {0} otherwise: calm with modulus 0, not upper Lipschitz, not Aubin";
  e.builtin = true;
  e.geneq.emplace(std::move(s));
  e.mapping = exact_map(halfline_jump_value, interval(-2.0, 2.0), 0x1.0p-10);
  e.config = config_1d();
  return e;
}

CatalogEntry bilinear_field() {
  GenEqSpec s = spec_1d("bilinear_field");
  s.base.reset();
  s.field = [](const Vector& p, const Vector& x) { return ClosedSet::outside_ball(1, std::abs(p[0] * x[0])); };
  s.reference_graph = GraphRep::whole(1, 1);
  CatalogEntry e;
  e.id = "bilinear_field";
  e.description = "null base, F(p,x) = {y : |y| >= |px|}: G(0) = R, G(p) = {0}; calm with modulus 0, not Aubin";
  e.builtin = true;
  e.geneq.emplace(std::move(s));
  e.mapping = exact_map(
      [](const Vector& p) { return p[0] == 0.0 ? ClosedSet::whole_space(1) : zero1(); }, interval(-1.0, 1.0),
      kStep1d);
  e.config = config_1d();
  e.expect_liplsc = Outcome::Fails;
  e.expect_calm = Outcome::Holds;
  return e;
}

CatalogEntry affine_tracking() {
  GenEqSpec s = spec_1d("affine_tracking");
  s.base = BaseFn(s.dims, [](const Vector& p, const Vector& x) { return Vector{x[0] - p[0]}; },
                  [](const Vector&, const Vector&) { return Matrix{{1.0}}; });
  s.field = [](const Vector&, const Vector&) { return zero1(); };
  s.reference_graph = zero_field_graph(1, 1);
  CatalogEntry e;
  e.id = "affine_tracking";
  e.description = "f(p,x) = x - p, F = {0}: G(p) = {p}";
  e.builtin = true;
  e.geneq.emplace(std::move(s));
  e.mapping = exact_map([](const Vector& p) { return ClosedSet::singleton(p); }, interval(-1.0, 1.0), kStep1d);
  e.config = config_1d();
  e.expect_liplsc = Outcome::Holds;
  e.expect_calm = Outcome::Holds;
  return e;
}

CatalogEntry smooth_family() {
  GenEqSpec s = spec_1d("smooth_family");
  s.base = BaseFn(s.dims,
                  [](const Vector& p, const Vector& x) { return Vector{x[0] + x[0] * x[0] - p[0] - p[0] * p[0]}; },
                  [](const Vector&, const Vector& x) { return Matrix{{1.0 + 2.0 * x[0]}}; });
  s.field = [](const Vector&, const Vector&) { return zero1(); };
  s.reference_graph = zero_field_graph(1, 1);
  CatalogEntry e;
  e.id = "smooth_family";
  e.description = "f(p,x) = x + x^2 - p - p^2, F = {0}: G(p) = {p, -1 - p}";
  e.builtin = true;
  e.geneq.emplace(std::move(s));
  e.mapping = exact_map(
      [](const Vector& p) { return ClosedSet::cloud({{p[0]}, {-1.0 - p[0]}}, 1); }, interval(-1.0, 1.0), kStep1d);
  e.config = config_1d();
  e.expect_liplsc = Outcome::Holds;
  e.expect_calm = Outcome::Holds;
  return e;
}

CatalogEntry shifted_halfline() {
  GenEqSpec s = spec_1d("shifted_halfline");
  s.base = BaseFn(s.dims, [](const Vector&, const Vector& x) { return x; }, [](const Vector&, const Vector&) {
    return Matrix{{1.0}};
  });
  s.field = [](const Vector& p, const Vector&) { return ClosedSet::box(p, {kInf}); };
  s.reference_graph = GraphRep(1, 1, {GraphPiece{{GraphConstraint::affine({0.0, -1.0}, 0.0)}}});
  CatalogEntry e;
  e.id = "shifted_halfline";
  e.description = "f(p,x) = x, F(p,x) = [p, inf): G(p) = [p, inf)";
  e.geneq.emplace(std::move(s));
  e.mapping = exact_map([](const Vector& p) { return ClosedSet::box(p, {kInf}); }, interval(-1.0, 1.0), kStep1d);
  e.config = config_1d();
  e.expect_liplsc = Outcome::Holds;
  e.expect_calm = Outcome::Holds;
  return e;
}

CatalogEntry two_dim_affine() {
  GenEqSpec s;
  s.name = "two_dim_affine";
  s.dims = {1, 2, 2};
  s.p_ref = {0.0};
  s.x_ref = {0.0, 0.0};
  s.p_region = interval(-0.5, 0.5);
  s.x_region = {{-1.0, -1.0}, {1.0, 1.0}};
  s.base = BaseFn(s.dims, [](const Vector& p, const Vector& x) { return Vector{x[0] - p[0], x[1] - p[0]}; },
                  [](const Vector&, const Vector&) { return Matrix{{1.0, 0.0}, {0.0, 1.0}}; });
  s.field = [](const Vector&, const Vector&) { return ClosedSet::singleton({0.0, 0.0}); };
  s.reference_graph = zero_field_graph(2, 2);
  CatalogEntry e;
  e.id = "two_dim_affine";
  e.description = "f(p,x) = x - (p, p) in R^2, F = {0}: G(p) = {(p, p)}";
  e.geneq.emplace(std::move(s));
  e.mapping = exact_map([](const Vector& p) { return ClosedSet::singleton({p[0], p[0]}); },
                        {{-1.0, -1.0}, {1.0, 1.0}}, 0x1.0p-6);
  e.config.x_step = 0x1.0p-6;
  e.expect_liplsc = Outcome::Holds;
  e.expect_calm = Outcome::Holds;
  return e;
}

CatalogEntry cubic_fold() {
  GenEqSpec s = spec_1d("cubic_fold");
  s.base = BaseFn(s.dims, [](const Vector& p, const Vector& x) { return Vector{x[0] * x[0] * x[0] - p[0]}; },
                  [](const Vector&, const Vector& x) { return Matrix{{3.0 * x[0] * x[0]}}; });
  s.field = [](const Vector&, const Vector&) { return zero1(); };
  s.reference_graph = zero_field_graph(1, 1);
  CatalogEntry e;
  e.id = "cubic_fold";
  e.description = "f(p,x) = x^3 - p, F = {0}: G(p) = {cbrt p}, neither Lipschitz lsc nor calm";
  e.geneq.emplace(std::move(s));
  e.mapping = exact_map([](const Vector& p) { return ClosedSet::singleton({std::cbrt(p[0])}); }, interval(-1.0, 1.0),
                        kStep1d);
  e.config = config_1d();
  e.expect_liplsc = Outcome::Fails;
  e.expect_calm = Outcome::Fails;
  return e;
}

CatalogEntry quadratic_fold() {
  GenEqSpec s = spec_1d("quadratic_fold");
  s.base = BaseFn(s.dims, [](const Vector& p, const Vector& x) { return Vector{x[0] * x[0] - p[0]}; },
                  [](const Vector&, const Vector& x) { return Matrix{{2.0 * x[0]}}; });
  s.field = [](const Vector&, const Vector&) { return zero1(); };
  s.reference_graph = zero_field_graph(1, 1);
  CatalogEntry e;
  e.id = "quadratic_fold";
  e.description = "f(p,x) = x^2 - p, F = {0}: the displacement has zero strict outer slope";
  e.geneq.emplace(std::move(s));
  e.config = config_1d();
  e.expect_liplsc = Outcome::Fails;
  e.expect_calm = Outcome::Fails;
  return e;
}

ParamOptSpec opt_spec(std::string name, std::function<double(const Vector&, const Vector&)> phi,
                      std::function<Vector(const Vector&, const Vector&)> grad) {
  ParamOptSpec s;
  s.name = std::move(name);
  s.objective = std::move(phi);
  s.grad_x_objective = std::move(grad);
  s.constraint = [](const Vector& p, const Vector& x) { return Vector{x[0] - p[0]}; };
  s.jac_x_constraint = [](const Vector&, const Vector&) { return Matrix{{1.0}}; };
  s.C = ClosedSet::box({0.0}, {kInf});
  s.p_ref = {0.0};
  s.x_ref = {0.0};
  s.p_region = interval(-0.5, 0.5);
  s.x_region = interval(-1.0, 1.0);
  return s;
}

CatalogEntry opt_entry(std::string id, std::string description, bool builtin, ParamOptSpec spec) {
  CatalogEntry e;
  e.id = std::move(id);
  e.description = std::move(description);
  e.builtin = builtin;
  e.opt.emplace(std::move(spec));
  e.config.x_step = e.opt->spec().x_step;
  return e;
}

CatalogEntry quad_box() {
  return opt_entry("quad_box", "minimize x^2 subject to x >= p", true,
                   opt_spec("quad_box", [](const Vector&, const Vector& x) { return x[0] * x[0]; },
                            [](const Vector&, const Vector& x) { return Vector{2.0 * x[0]}; }));
}

CatalogEntry linear_halfline() {
  return opt_entry("linear_halfline", "minimize 2x subject to x >= p: val(p) = 2p, Argmin(p) = {p}", true,
                   opt_spec("linear_halfline", [](const Vector&, const Vector& x) { return 2.0 * x[0]; },
                            [](const Vector&, const Vector&) { return Vector{2.0}; }));
}

CatalogEntry linear_flat() {
  return opt_entry("linear_flat", "minimize x subject to x >= p: slope of the objective equals kappa", false,
                   opt_spec("linear_flat", [](const Vector&, const Vector& x) { return x[0]; },
                            [](const Vector&, const Vector&) { return Vector{1.0}; }));
}

CatalogEntry sqrt_objective() {
  ParamOptSpec s = opt_spec("sqrt_objective", [](const Vector& p, const Vector&) { return -std::sqrt(std::abs(p[0])); },
                            [](const Vector&, const Vector&) { return Vector{0.0}; });
  s.C = ClosedSet::whole_space(1);
  // Finer grid so that enough parameter scales clear the grid cutoff.
  s.x_region = {{-0.25}, {0.25}};
  s.x_step = 0x1.0p-14;
  return opt_entry("sqrt_objective", "objective -sqrt|p| constant in x, no constraint: not calm", false, std::move(s));
}

CatalogEntry linear_halfline_argmin() {
  const CatalogEntry base = linear_halfline();
  CatalogEntry e;
  e.id = "linear_halfline_argmin";
  e.description = "generalized equation (phi - valf, h) in {0} x C built from linear_halfline: G = Argmin";
  e.geneq.emplace(argmin_generalized_equation(*base.opt));
  e.mapping = exact_map([](const Vector& p) { return ClosedSet::singleton(p); }, interval(-1.0, 1.0), 0x1.0p-10);
  e.config = argmin_check_config(*base.opt, CheckConfig{});
  e.expect_liplsc = Outcome::Holds;
  e.expect_calm = Outcome::Holds;
  return e;
}

using Factory = CatalogEntry (*)();

struct Item {
  const char* id;
  Factory make;
};

const std::vector<Item>& items() {
  static const std::vector<Item> v = {
      {"sqrt_epigraph", sqrt_epigraph},
      {"halfline_jump", halfline_jump},
      {"bilinear_field", bilinear_field},
      {"affine_tracking", affine_tracking},
      {"smooth_family", smooth_family},
      {"quad_box", quad_box},
      {"linear_halfline", linear_halfline},
      {"shifted_halfline", shifted_halfline},
      {"two_dim_affine", two_dim_affine},
      {"linear_halfline_argmin", linear_halfline_argmin},
      {"cubic_fold", cubic_fold},
      {"quadratic_fold", quadratic_fold},
      {"linear_flat", linear_flat},
      {"sqrt_objective", sqrt_objective},
  };
  return v;
}

}  // namespace

std::vector<std::string> builtin_ids() {
  return {"sqrt_epigraph", "halfline_jump", "bilinear_field", "affine_tracking",
          "smooth_family", "quad_box",      "linear_halfline"};
}

std::vector<std::string> catalog_ids() {
  std::vector<std::string> out;
  for (const auto& i : items()) out.emplace_back(i.id);
  return out;
}

CatalogEntry catalog_entry(const std::string& id) {
  for (const auto& i : items()) {
    if (id == i.id) return i.make();
  }
  throw ContractViolation("unknown catalog instance '" + id + "'");
}

std::vector<CatalogEntry> geneq_catalog() {
  std::vector<CatalogEntry> out;
  for (const auto& i : items()) {
    CatalogEntry e = i.make();
    if (e.geneq) out.push_back(std::move(e));
  }
  return out;
}

std::vector<CatalogEntry> opt_catalog() {
  std::vector<CatalogEntry> out;
  for (const auto& i : items()) {
    CatalogEntry e = i.make();
    if (e.opt) out.push_back(std::move(e));
  }
  return out;
}

std::vector<NamedFunction> function_catalog() {
  std::vector<NamedFunction> out;
  out.push_back({"quadratic_2d",
                 CatalogFunction::smooth(
                     2, [](const Vector& x) { return x[0] * x[0] + 2.0 * x[1] * x[1] + x[0]; },
                     [](const Vector& x) { return Vector{2.0 * x[0] + 1.0, 4.0 * x[1]}; }),
                 {0.3, -0.2}});
  out.push_back({"abs", CatalogFunction::abs_affine({1.0}, 0.0), {0.0}});
  out.push_back({"norm_2d", CatalogFunction::norm({0.0, 0.0}), {0.0, 0.0}});
  out.push_back({"max_line_pair",
                 CatalogFunction::max_of_smooth(
                     1, {[](const Vector& x) { return x[0]; }, [](const Vector& x) { return -2.0 * x[0]; }},
                     {[](const Vector&) { return Vector{1.0}; }, [](const Vector&) { return Vector{-2.0}; }}),
                 {0.0}});
  out.push_back({"halfline_indicator", CatalogFunction::polyhedron_indicator(1, {{{-1.0}, 0.0}}), {0.0}});
  out.push_back({"affine_tracking_disp",
                 CatalogFunction::abs_affine({1.0, -1.0}, 0.0)
                     .with_indicator({{{0.0, 1.0}, 0.0}, {{0.0, -1.0}, 0.0}})
                     .with_metric(Metric::blocks({1, 1})),
                 {0.0, 0.0}});
  out.push_back({"abs_on_halfline", CatalogFunction::abs_affine({1.0}, 0.5).with_indicator({{{-1.0}, 0.0}}), {0.5}});
  return out;
}

}  // namespace varistab
