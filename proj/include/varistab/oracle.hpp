#pragma once

// Brute-force estimators of the stability moduli of a set-valued mapping over
// explicit grids. These are the ground truth every theorem bound is compared
// against.

#include <functional>
#include <string>
#include <vector>

#include "varistab/geneq.hpp"
#include "varistab/metric.hpp"

namespace varistab {

/// Set-valued mapping p -> Phi(p) that can be evaluated pointwise. Values
/// that are not finite clouds are sampled on the x-grid when their points
/// are needed.
struct SetValuedMap {
  std::function<ClosedSet(const Vector& p)> value;
  std::size_t p_dim = 1, x_dim = 1;
  Metric p_metric, x_metric;
  Region x_region;
  double x_step = 0x1.0p-10;
};

/// Parameter grid: pbar + r_k d for the shrinking radii r_k = r0 * ratio^k
/// and the signed axes plus `extra_dirs` quasi-random unit directions.
/// The default ratio 1/4 keeps the scales powers of two while letting
/// square-root growth clear the divergence threshold.
struct OracleGrid {
  Vector p_ref, x_ref;
  double r0 = 0.5;
  double ratio = 0.25;
  int scales = 8;
  std::size_t extra_dirs = 0;
  std::uint64_t seed = 0;
  double delta = 0.5;  // x-localization radius (calm, aubin)
  /// Extra parameter points evaluated at scale index 0 (e.g. p = 0.01).
  std::vector<Vector> extra_points;

  std::vector<double> radii() const;
};

enum class ModulusKind { LipLsc, Calm, UpperLipschitz, Aubin };

const char* to_string(ModulusKind kind);

struct Quotient {
  Vector p, p2;  // p2 is the second parameter of an Aubin pair
  Vector x;      // witness point
  int scale;
  double value;
};

struct EmpiricalEstimate {
  ModulusKind kind;
  double value = 0.0;          // sup over the grid, +inf when diverging
  bool diverging = false;
  std::vector<double> scale_radius;
  std::vector<double> scale_value;  // sup of quotients at each scale
  Quotient witness;
  std::vector<Quotient> quotients;  // per parameter point (per pair for Aubin)
  double x_step = 0.0;
  double delta = 0.0;
};

/// Divergence rule: the per-scale sup grows by a factor >= 1.5 over each of
/// the last four scale steps.
bool diverging_trace(const std::vector<double>& values);

EmpiricalEstimate empirical_modulus(const SetValuedMap& map, ModulusKind kind, const OracleGrid& grid);

struct Verdict {
  bool pass;
  double bound;
  double empirical;
  double threshold;  // bound * (1 + slack) + spacing
  Quotient witness;
};

Verdict verdict_compare(double bound, const EmpiricalEstimate& empirical, double slack = 0.05,
                        double spacing = 0.0);

/// G(p) realized as the cloud solve_on_grid(prob, p, x_region, step, tol).
SetValuedMap solution_map(const GenEqProblem& prob, double step, double tol);

}  // namespace varistab
