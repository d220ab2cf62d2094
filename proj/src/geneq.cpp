#include "varistab/geneq.hpp"

#include <algorithm>
#include <cmath>

#include "varistab/errors.hpp"

namespace varistab {

BaseFn::BaseFn(Dims dims, Eval eval, Jacobian jacobian)
    : dims_(dims), eval_(std::move(eval)), jacobian_(std::move(jacobian)) {
  if (!eval_) throw ContractViolation("base evaluator missing");
}

BaseFn BaseFn::zero(Dims dims) {
  BaseFn f(
      dims, [d = dims.y](const Vector&, const Vector&) { return Vector(d, 0.0); },
      [dims](const Vector&, const Vector&) { return Matrix(dims.y, Vector(dims.x, 0.0)); });
  f.null_ = true;
  return f;
}

Vector BaseFn::operator()(const Vector& p, const Vector& x) const {
  require_dim(p, dims_.p, "base parameter");
  require_dim(x, dims_.x, "base state");
  Vector y = eval_(p, x);
  require_dim(y, dims_.y, "base value");
  return y;
}

Matrix BaseFn::jacobian(const Vector& p, const Vector& x) const {
  if (!jacobian_) throw Unsupported("base has no x-Jacobian");
  return jacobian_(p, x);
}

double jacobian_fd_error(const BaseFn& base, const Vector& p, const Vector& x, const Vector& v, double h) {
  const Matrix j = base.jacobian(p, x);
  const Vector f0 = base(p, x);
  const Vector f1 = base(p, axpy(x, h, v));
  double worst = 0.0;
  for (std::size_t i = 0; i < f0.size(); ++i) {
    worst = std::max(worst, std::abs(dot(j[i], v) - (f1[i] - f0[i]) / h));
  }
  return worst;
}

double Region::radius() const {
  double r = kInf;
  for (std::size_t i = 0; i < lo.size(); ++i) r = std::min(r, 0.5 * (hi[i] - lo[i]));
  return r;
}

bool Region::contains(const Vector& v) const {
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (v[i] < lo[i] - 1e-12 || v[i] > hi[i] + 1e-12) return false;
  }
  return true;
}

GenEqProblem::GenEqProblem(GenEqSpec spec)
    : spec_(std::move(spec)), base_(spec_.base ? *spec_.base : BaseFn::zero(spec_.dims)) {
  if (!spec_.field) throw ContractViolation("field evaluator missing");
  require_dim(spec_.p_ref, spec_.dims.p, "reference parameter");
  require_dim(spec_.x_ref, spec_.dims.x, "reference state");
  require_finite(spec_.p_ref, "reference parameter");
  require_finite(spec_.x_ref, "reference state");
  require_dim(spec_.p_region.lo, spec_.dims.p, "parameter region");
  require_dim(spec_.x_region.lo, spec_.dims.x, "state region");
  y_ref_ = base_(spec_.p_ref, spec_.x_ref);
  const ClosedSet value = spec_.field(spec_.p_ref, spec_.x_ref);
  if (value.dim() != spec_.dims.y) throw ContractViolation("field value has wrong dimension");
  if (value.distance(y_ref_) > spec_.tol_feas) {
    throw ContractViolation(spec_.name + ": reference state does not solve the equation at the reference parameter");
  }
}

Metric GenEqProblem::xy_metric() const {
  return Metric::product(spec_.x_metric, spec_.dims.x, spec_.y_metric, spec_.dims.y);
}

double displacement(const GenEqProblem& prob, const Vector& p, const Vector& x) {
  const Vector y = prob.base()(p, x);
  const ClosedSet value = prob.field()(p, x);
  if (value.empty()) return kInf;
  // Distances in Y follow the field's own metric; product fields carry the
  // sum metric.
  return value.distance(y);
}

double graph_displacement(const GenEqProblem& prob, const Vector& x, const Vector& y) {
  require_dim(y, prob.dims().y, "graph_displacement y");
  const ClosedSet value = prob.field()(prob.p_ref(), x);
  if (value.distance(y) > prob.tol_feas()) return kInf;
  return prob.y_metric().distance(prob.base()(prob.p_ref(), x), y);
}

SolutionSample solve_on_grid(const GenEqProblem& prob, const Vector& p, const Region& region, double step,
                             double tol) {
  const std::vector<Vector> grid = grid_points(region.lo, region.hi, step);
  std::vector<char> keep(grid.size(), 0);
  parallel_for(grid.size(), [&](std::size_t i) { keep[i] = displacement(prob, p, grid[i]) <= tol; });
  SolutionSample out{p, {}, step, tol};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (keep[i]) out.points.push_back(grid[i]);
  }
  return out;
}

LscCheck displacement_lsc_check(const GenEqProblem& prob, const Vector& p, const Vector& x,
                                const RadiusSchedule& schedule, double tol) {
  schedule.validate();
  const double base_value = displacement(prob, p, x);
  const auto dirs = unit_directions(prob.x_metric(), x.size(),
                                    static_cast<std::size_t>(schedule.samples_per_level), schedule.seed);
  std::vector<double> margins;
  std::vector<Vector> witnesses;
  for (int k = 0; k < schedule.levels; ++k) {
    const double eps = schedule.radius(k);
    double worst = kInf;
    Vector witness = x;
    for (const auto& d : dirs) {
      for (double frac : {1.0, 0.5, 0.25}) {
        const Vector z = axpy(x, frac * eps, d);
        const double m = displacement(prob, p, z) - base_value;
        if (m < worst) {
          worst = m;
          witness = z;
        }
      }
    }
    margins.push_back(worst);
    witnesses.push_back(witness);
  }
  // The per-level minimum behaves like m0 + c * eps for locally Lipschitz
  // displacements; Richardson elimination of the linear term leaves the jump.
  const double rho = schedule.decay;
  const double last = margins.back(), prev = margins[margins.size() - 2];
  double margin = last;
  if (last < 0.0 && std::isfinite(last) && std::isfinite(prev)) {
    margin = std::min(0.0, (last - rho * prev) / (1.0 - rho));
  }
  return {margin >= -std::max(tol, 1e-6), margin, witnesses.back()};
}

}  // namespace varistab
