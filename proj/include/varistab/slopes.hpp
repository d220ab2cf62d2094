#pragma once

// Sampled estimators of the strong slope, the strict outer slope and its
// partial (x-only) version.
//
// Limits as the radius shrinks are reported as the finest-level value plus a
// monotonicity diagnostic; no extrapolation.

#include <functional>
#include <vector>

#include "varistab/metric.hpp"
#include "varistab/sampling.hpp"

namespace varistab {

/// Extended-real function on R^dim with the metric of its domain. `retract`,
/// when set, maps raw samples onto the set where the function is finite
/// (for instance the graph of a field), so that sampling does not waste its
/// budget on +inf values.
struct ScalarMap {
  std::function<double(const Vector&)> value;
  Metric metric;
  std::size_t dim = 1;
  std::function<Vector(const Vector&)> retract;

  double operator()(const Vector& x) const { return value(x); }
};

struct SlopeEstimate {
  std::vector<double> levels;  // per-radius values, coarse to fine
  std::vector<double> radii;
  double value = 0.0;          // finest-level value
  bool monotone = true;
  bool local_min = false;      // sampled evidence only
  bool empty_level = false;    // some level had no qualifying point (+inf)
  Vector witness;              // point realizing the finest-level value
};

/// Sampled local slope at x: max over candidates z with 0 < d(z,x) <= radius
/// of (g(x) - g(z))^+ / d(z, x).
double local_slope(const ScalarMap& g, const Vector& x, double radius, const std::vector<Vector>& dirs);

/// Strong slope: per level, the local slope over B(x, eps_k).
/// Throws DomainError when g(x) is infinite.
SlopeEstimate strong_slope(const ScalarMap& g, const Vector& x, const RadiusSchedule& schedule);

/// Points z in B(xbar, eps) with g(xbar) < g(z) <= g(xbar) + eps, sampled
/// deterministically.
std::vector<Vector> qualifying_points(const ScalarMap& g, const Vector& xbar, double eps,
                                      const RadiusSchedule& schedule, int level);

/// Strict outer slope: per level, the inf of the strong slope over the
/// qualifying points (inf over an empty set is +inf, flagged).
SlopeEstimate strict_outer_slope(const ScalarMap& g, const Vector& xbar, const RadiusSchedule& schedule);

/// Function psi(p, x) of parameter and state.
struct BivariateMap {
  std::function<double(const Vector& p, const Vector& x)> value;
  Metric p_metric, x_metric;
  std::size_t p_dim = 1, x_dim = 1;
};

/// Partial strict outer slope: qualification over (p, x) in
/// B(pbar, eps) x B(xbar, eps), inner strong slope in x with p frozen.
SlopeEstimate partial_strict_outer_slope_x(const BivariateMap& psi, const Vector& pbar, const Vector& xbar,
                                           const RadiusSchedule& schedule);

/// Radius used for the inner strong slope at a qualifying point whose value
/// exceeds the base value by `gap`.
double inner_radius(double eps, double gap);

}  // namespace varistab
