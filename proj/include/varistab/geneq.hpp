#pragma once

// Parameterized generalized equations f(p, x) in F(p, x), their displacement
// functions and the grid realization of the solution mapping
// G(p) = {x : f(p, x) in F(p, x)}.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "varistab/graph.hpp"
#include "varistab/metric.hpp"
#include "varistab/sampling.hpp"

namespace varistab {

struct Dims {
  std::size_t p = 1, x = 1, y = 1;
};

/// Base f : P x X -> Y, optionally with its x-Jacobian.
class BaseFn {
 public:
  using Eval = std::function<Vector(const Vector& p, const Vector& x)>;
  using Jacobian = std::function<Matrix(const Vector& p, const Vector& x)>;

  BaseFn(Dims dims, Eval eval, Jacobian jacobian = {});
  /// The null base f == 0.
  static BaseFn zero(Dims dims);

  Vector operator()(const Vector& p, const Vector& x) const;
  const Dims& dims() const { return dims_; }
  bool is_null() const { return null_; }
  bool has_jacobian() const { return static_cast<bool>(jacobian_); }
  /// dim Y rows, dim X columns. Throws Unsupported without a Jacobian.
  Matrix jacobian(const Vector& p, const Vector& x) const;

 private:
  Dims dims_;
  Eval eval_;
  Jacobian jacobian_;
  bool null_ = false;
};

/// max |J v - (f(p, x + h v) - f(p, x)) / h| over the coordinates of Y.
double jacobian_fd_error(const BaseFn& base, const Vector& p, const Vector& x, const Vector& v,
                         double h = 1e-6);

/// Field F : P x X -> closed subsets of Y.
using FieldFn = std::function<ClosedSet(const Vector& p, const Vector& x)>;

struct Region {
  Vector lo, hi;

  double radius() const;
  bool contains(const Vector& v) const;
};

struct GenEqSpec {
  std::string name;
  Dims dims;
  std::optional<BaseFn> base;  // absent means f == 0
  FieldFn field;
  Vector p_ref, x_ref;
  Region p_region, x_region;
  Metric p_metric, x_metric, y_metric;
  double tol_feas = kTolFeas;
  /// Graph of F(p_ref, .) for the dual checks.
  std::optional<GraphRep> reference_graph;
};

class GenEqProblem {
 public:
  /// Computes y_ref = f(p_ref, x_ref) and throws ContractViolation unless
  /// x_ref solves the equation at p_ref within tol_feas.
  explicit GenEqProblem(GenEqSpec spec);

  const std::string& name() const { return spec_.name; }
  const Dims& dims() const { return spec_.dims; }
  const BaseFn& base() const { return base_; }
  const FieldFn& field() const { return spec_.field; }
  const Vector& p_ref() const { return spec_.p_ref; }
  const Vector& x_ref() const { return spec_.x_ref; }
  const Vector& y_ref() const { return y_ref_; }
  const Region& p_region() const { return spec_.p_region; }
  const Region& x_region() const { return spec_.x_region; }
  const Metric& p_metric() const { return spec_.p_metric; }
  const Metric& x_metric() const { return spec_.x_metric; }
  const Metric& y_metric() const { return spec_.y_metric; }
  /// Sum metric on X x Y.
  Metric xy_metric() const;
  double tol_feas() const { return spec_.tol_feas; }
  const std::optional<GraphRep>& reference_graph() const { return spec_.reference_graph; }

 private:
  GenEqSpec spec_;
  BaseFn base_;
  Vector y_ref_;
};

/// psi(p, x) = dist(f(p, x), F(p, x)).
double displacement(const GenEqProblem& prob, const Vector& p, const Vector& x);

/// disp(x, y) = d(f(p_ref, x), y) + indicator of grph F(p_ref, .). Membership
/// in the graph is tested within tol_feas.
double graph_displacement(const GenEqProblem& prob, const Vector& x, const Vector& y);

struct SolutionSample {
  Vector p;
  std::vector<Vector> points;
  double step;
  double tol;
};

/// All grid points x of `region` (spacing `step`) with psi(p, x) <= tol.
/// Throws BudgetExceeded above 10^7 grid points.
SolutionSample solve_on_grid(const GenEqProblem& prob, const Vector& p, const Region& region,
                             double step, double tol = 1e-6);

struct LscCheck {
  bool holds;
  double margin;    // liminf psi(p, z) - psi(p, x), worst sampled
  Vector witness;   // z realizing the margin
};

/// Sampled lower semicontinuity of psi(p, .) at x over the schedule's balls.
LscCheck displacement_lsc_check(const GenEqProblem& prob, const Vector& p, const Vector& x,
                                const RadiusSchedule& schedule, double tol = kTolFeas);

}  // namespace varistab
