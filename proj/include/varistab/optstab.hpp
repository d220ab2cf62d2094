#pragma once

// Parametric constrained optimization: minimize phi(p, x) subject to
// h(p, x) in C. Value functions and Argmin on grids, scalar calmness checks,
// the value-function propositions and the Argmin Lipschitz-lsc criterion.

#include <functional>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "varistab/dual.hpp"
#include "varistab/geneq.hpp"
#include "varistab/oracle.hpp"
#include "varistab/stability.hpp"

namespace varistab {

struct ParamOptSpec {
  std::string name;
  std::size_t p_dim = 1, x_dim = 1, h_dim = 1;
  std::function<double(const Vector& p, const Vector& x)> objective;
  std::function<Vector(const Vector& p, const Vector& x)> constraint;
  ClosedSet C = ClosedSet::whole_space(1);
  Vector p_ref, x_ref;
  Region p_region, x_region;
  double x_step = 0x1.0p-10;
  Metric p_metric, x_metric, h_metric;
  /// x-Lipschitz constant of h near the reference; 0 means estimate it.
  double kappa = 0.0;
  double neighborhood = 0.25;
  double tol_feas = kTolFeas;
  // Optional derivative data for the subdifferential and smooth variants.
  std::function<Vector(const Vector& p, const Vector& x)> grad_x_objective;
  std::function<Matrix(const Vector& p, const Vector& x)> jac_x_constraint;
  std::function<SubdifferentialRep(const Vector& p, const Vector& x)> subdiff_x_objective;
};

struct ValueResult {
  double value = kInf;       // +inf when the feasible grid is empty
  std::vector<Vector> argmin;  // lexicographically sorted
  std::size_t feasible = 0;
};

class ParamOptProblem {
 public:
  explicit ParamOptProblem(ParamOptSpec spec);

  const ParamOptSpec& spec() const { return spec_; }
  const std::string& name() const { return spec_.name; }
  double objective(const Vector& p, const Vector& x) const { return spec_.objective(p, x); }
  Vector constraint(const Vector& p, const Vector& x) const;
  bool feasible(const Vector& p, const Vector& x) const;
  const std::vector<Vector>& x_grid() const { return x_grid_; }
  /// Sampled x-Lipschitz quotient of h near the reference.
  double kappa_sampled() const { return kappa_sampled_; }
  /// Constant used in comparisons: the declared kappa, or the sampled one
  /// inflated by 10%.
  double kappa() const { return kappa_; }

  /// Global grid value function, memoized per parameter.
  ValueResult value(const Vector& p) const;

 private:
  struct Cache {
    std::mutex mutex;
    std::list<Vector> order;
    std::map<Vector, std::pair<ValueResult, std::list<Vector>::iterator>> entries;
  };

  ParamOptSpec spec_;
  std::vector<Vector> x_grid_;
  double kappa_sampled_ = 0.0;
  double kappa_ = 0.0;
  std::shared_ptr<Cache> cache_;
};

struct ValueScope {
  bool local = false;
  Vector center;
  double radius = 0.0;
};

/// Grid minimum of phi(p, .) over feasible points (restricted to B(center, r)
/// for the local scope).
ValueResult value_function(const ParamOptProblem& prob, const Vector& p, const ValueScope& scope = {});

enum class Side { Above, Below, Both };
const char* to_string(Side s);

struct ScalarCalmConfig {
  double r0 = 0.5;
  double ratio = 0.25;
  int scales = 8;
  std::size_t extra_dirs = 0;
  std::uint64_t seed = 0;
  Metric metric;
};

struct ScalarCalmResult {
  Side side;
  std::vector<double> radii, upper_trace, lower_trace;
  double upper = 0.0;  // sup of (g(p) - g(pbar)) / d, +inf when diverging
  double lower = 0.0;  // inf of the same quotient, -inf when diverging
  bool calm_above = true, calm_below = true;
  bool holds = true;   // for the requested side(s)
  Vector witness_upper, witness_lower;
};

ScalarCalmResult scalar_calmness(const std::function<double(const Vector&)>& g, const Vector& pbar, Side side,
                                 const ScalarCalmConfig& config);

struct ProblemCalmResult {
  double inf_quotient = 0.0;  // -inf when diverging
  bool calm = true;
  std::vector<double> radii, trace;
  Vector witness_p, witness_x;
};

/// Grid infimum of (phi(p, x) - phi(pbar, xbar)) / d(p, pbar) over p in
/// B(pbar, r) \ {pbar} and feasible x in B(xbar, r). Throws
/// ContractViolation when xbar is not optimal on the grid.
ProblemCalmResult problem_calmness(const ParamOptProblem& prob, double r, const CheckConfig& config);

enum class ValueProp { P1, P2, P3, P4 };
const char* to_string(ValueProp p);

struct PropReport {
  ValueProp which;
  std::vector<HypothesisStatus> hypotheses;
  bool hypotheses_hold = false;
  HypothesisStatus conclusion;
  /// P3 only: -kappa_phi (l + 2) and the observed liminf quotient of valf.
  std::optional<double> quantitative_bound;
  std::optional<double> quantitative_value;
  bool quantitative_ok = true;
  /// Hypotheses hold while the conclusion test fails: a toolkit bug.
  bool bug = false;
  Outcome outcome = Outcome::Undetermined;
};

PropReport check_value_function_props(const ParamOptProblem& prob, ValueProp which, const CheckConfig& config);

enum class ArgminVariant { Slope, Subdifferential, Smooth };
const char* to_string(ArgminVariant v);

/// Generalized equation whose solution mapping is Argmin: base
/// (phi - valf, h), field {0} x C, sum metric on the image.
GenEqProblem argmin_generalized_equation(const ParamOptProblem& prob);

/// Check configuration adapted to the optimization grid (parameter scales no
/// finer than eight grid steps, oracle grid = optimization grid).
CheckConfig argmin_check_config(const ParamOptProblem& prob, CheckConfig config);

struct ArgminReport {
  ArgminVariant variant;
  std::vector<HypothesisStatus> hypotheses;
  double kappa = 0.0;
  double slope = 0.0;  // left side of hypothesis (v)
  std::optional<LiplscReport> liplsc;
  std::optional<EmpiricalEstimate> oracle;  // Argmin Lipschitz-lsc constant
  std::optional<Verdict> verdict;
  bool argmin_matches = true;  // G(p) == Argmin(p) on the grid
  Outcome outcome = Outcome::Undetermined;
};

ArgminReport check_argmin_liplsc(const ParamOptProblem& prob, ArgminVariant variant, const CheckConfig& config);

}  // namespace varistab
