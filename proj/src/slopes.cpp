#include "varistab/slopes.hpp"

#include <algorithm>
#include <cmath>

#include "varistab/errors.hpp"

namespace varistab {

namespace {

constexpr double kMonotoneTol = 0.02;
constexpr double kInnerFractions[] = {1.0, 0.25, 0.0625};
constexpr int kQualifyingFractions = 11;  // 1, 1/2, ..., 1/1024
constexpr std::size_t kMaxQualifying = 128;

struct Probe {
  double quotient = 0.0;
  Vector z;
};

// Descent quotient of g from x to the (retracted) point x + r d.
Probe probe(const ScalarMap& g, const Vector& x, double gx, double r, const Vector& d) {
  Vector z = axpy(x, r, d);
  if (g.retract) z = g.retract(z);
  const double dist = g.metric.distance(z, x);
  Probe out{0.0, z};
  if (!(dist > 0.0) || dist > r * (1.0 + 1e-9)) return out;
  const double gz = g(z);
  if (!std::isfinite(gz)) return out;
  out.quotient = std::max(0.0, gx - gz) / dist;
  return out;
}

Vector renormalize(const Metric& m, Vector d) {
  const double n = m.norm(d);
  return n > 0.0 ? scale(d, 1.0 / n) : d;
}

// Local slope at x over directions, followed by a pattern search on the unit
// sphere around the best direction found.
Probe best_descent(const ScalarMap& g, const Vector& x, double gx, double radius,
                   const std::vector<Vector>& dirs) {
  Probe best;
  double best_r = radius;
  Vector best_d;
  for (double frac : kInnerFractions) {
    const double r = frac * radius;
    for (const auto& d : dirs) {
      Probe p = probe(g, x, gx, r, d);
      if (p.quotient > best.quotient) {
        best = std::move(p);
        best_r = r;
        best_d = d;
      }
    }
  }
  if (best.quotient <= 0.0) return best;
  for (double h = 0.2; h > 1e-3; h *= 0.5) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (std::size_t i = 0; i < x.size(); ++i) {
        for (double s : {1.0, -1.0}) {
          Vector d = best_d;
          d[i] += s * h;
          d = renormalize(g.metric, d);
          Probe p = probe(g, x, gx, best_r, d);
          if (p.quotient > best.quotient * (1.0 + 1e-12)) {
            best = std::move(p);
            best_d = std::move(d);
            improved = true;
          }
        }
      }
    }
  }
  return best;
}

bool levels_monotone(const std::vector<double>& v) {
  for (std::size_t k = 1; k < v.size(); ++k) {
    if (!std::isfinite(v[k - 1]) || !std::isfinite(v[k])) continue;
    if (v[k] < v[k - 1] - kMonotoneTol * std::max(1.0, std::abs(v[k - 1]))) return false;
  }
  return true;
}

std::vector<Vector> directions_for(const Metric& m, std::size_t dim, const RadiusSchedule& s) {
  return unit_directions(m, dim, static_cast<std::size_t>(s.samples_per_level), s.seed);
}

// Deterministic thinning that keeps every stratum of the candidate order.
std::vector<Vector> thin(std::vector<Vector> pts) {
  if (pts.size() <= kMaxQualifying) return pts;
  std::vector<Vector> out;
  out.reserve(kMaxQualifying);
  const double stride = static_cast<double>(pts.size()) / kMaxQualifying;
  for (std::size_t i = 0; i < kMaxQualifying; ++i) {
    out.push_back(std::move(pts[static_cast<std::size_t>(i * stride)]));
  }
  return out;
}

}  // namespace

double inner_radius(double eps, double gap) {
  return std::max(1e-9, std::min(1e-3 * eps, 0.25 * gap));
}

double local_slope(const ScalarMap& g, const Vector& x, double radius, const std::vector<Vector>& dirs) {
  const double gx = g(x);
  if (!std::isfinite(gx)) throw DomainError("slope: function value is not finite at the base point");
  return best_descent(g, x, gx, radius, dirs).quotient;
}

SlopeEstimate strong_slope(const ScalarMap& g, const Vector& x, const RadiusSchedule& schedule) {
  schedule.validate();
  const double gx = g(x);
  if (!std::isfinite(gx)) throw DomainError("strong_slope: function value is not finite at x");
  const auto dirs = directions_for(g.metric, g.dim, schedule);
  SlopeEstimate est;
  for (int k = 0; k < schedule.levels; ++k) {
    const double eps = schedule.radius(k);
    Probe p = best_descent(g, x, gx, eps, dirs);
    est.levels.push_back(p.quotient);
    est.radii.push_back(eps);
    if (k + 1 == schedule.levels) {
      est.value = p.quotient;
      est.local_min = p.quotient <= 0.0;
      est.witness = p.z.empty() ? x : p.z;
    }
  }
  est.monotone = levels_monotone(est.levels);
  return est;
}

std::vector<Vector> qualifying_points(const ScalarMap& g, const Vector& xbar, double eps,
                                      const RadiusSchedule& schedule, int level) {
  const double g0 = g(xbar);
  if (!std::isfinite(g0)) throw DomainError("strict outer slope: function value is not finite at the base point");
  RadiusSchedule s = schedule;
  s.seed = schedule.seed + static_cast<std::uint64_t>(level) * 7919u;
  const auto dirs = directions_for(g.metric, g.dim, s);
  std::vector<Vector> out;
  double frac = 1.0;
  for (int j = 0; j < kQualifyingFractions; ++j, frac *= 0.5) {
    for (const auto& d : dirs) {
      Vector z = axpy(xbar, frac * eps, d);
      if (g.retract) z = g.retract(z);
      if (g.metric.distance(z, xbar) > eps * (1.0 + 1e-9)) continue;
      const double gz = g(z);
      if (gz > g0 && gz <= g0 + eps) out.push_back(std::move(z));
    }
  }
  return thin(std::move(out));
}

SlopeEstimate strict_outer_slope(const ScalarMap& g, const Vector& xbar, const RadiusSchedule& schedule) {
  schedule.validate();
  const double g0 = g(xbar);
  if (!std::isfinite(g0)) throw DomainError("strict_outer_slope: function value is not finite at the base point");
  const auto dirs = directions_for(g.metric, g.dim, schedule);
  SlopeEstimate est;
  for (int k = 0; k < schedule.levels; ++k) {
    const double eps = schedule.radius(k);
    const auto pts = qualifying_points(g, xbar, eps, schedule, k);
    std::vector<double> slopes(pts.size());
    parallel_for(pts.size(), [&](std::size_t i) {
      const double gx = g(pts[i]);
      const double r = std::max(1e-9, std::min(inner_radius(eps, gx - g0), 0.25 * g.metric.distance(pts[i], xbar)));
      slopes[i] = best_descent(g, pts[i], gx, r, dirs).quotient;
    });
    double inf = kInf;
    Vector witness;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (slopes[i] < inf) {
        inf = slopes[i];
        witness = pts[i];
      }
    }
    if (pts.empty()) est.empty_level = true;
    est.levels.push_back(inf);
    est.radii.push_back(eps);
    if (k + 1 == schedule.levels) {
      est.value = inf;
      est.witness = witness.empty() ? xbar : witness;
    }
  }
  est.monotone = levels_monotone(est.levels);
  est.local_min = est.value <= 0.0;
  return est;
}

SlopeEstimate partial_strict_outer_slope_x(const BivariateMap& psi, const Vector& pbar, const Vector& xbar,
                                           const RadiusSchedule& schedule) {
  schedule.validate();
  const double g0 = psi.value(pbar, xbar);
  if (!std::isfinite(g0)) throw DomainError("partial_strict_outer_slope_x: psi is not finite at the reference");
  const std::size_t np = psi.p_dim, nx = psi.x_dim;
  // Joint directions: blocks are unit-sum so both parts stay inside their
  // eps-balls.
  const Metric joint = Metric::blocks({np, nx});
  ScalarMap joint_map{[&](const Vector& z) { return psi.value(slice(z, 0, np), slice(z, np, nx)); }, joint,
                      np + nx, {}};
  const Vector zbar = concat(pbar, xbar);
  const auto xdirs = directions_for(psi.x_metric, nx, schedule);
  SlopeEstimate est;
  for (int k = 0; k < schedule.levels; ++k) {
    const double eps = schedule.radius(k);
    std::vector<Vector> pts;
    for (auto& z : qualifying_points(joint_map, zbar, eps, schedule, k)) {
      // Qualification uses the product of balls, not the sum-metric ball.
      if (psi.p_metric.distance(slice(z, 0, np), pbar) <= eps * (1 + 1e-9) &&
          psi.x_metric.distance(slice(z, np, nx), xbar) <= eps * (1 + 1e-9)) {
        pts.push_back(std::move(z));
      }
    }
    std::vector<double> slopes(pts.size());
    parallel_for(pts.size(), [&](std::size_t i) {
      const Vector p = slice(pts[i], 0, np), x = slice(pts[i], np, nx);
      ScalarMap gx{[&psi, p](const Vector& z) { return psi.value(p, z); }, psi.x_metric, nx, {}};
      const double v = psi.value(p, x);
      const double r = std::max(1e-9, std::min(inner_radius(eps, v - g0), 0.25 * psi.x_metric.distance(x, xbar) +
                                                                             0.25 * (v - g0)));
      slopes[i] = best_descent(gx, x, v, r, xdirs).quotient;
    });
    double inf = kInf;
    Vector witness;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (slopes[i] < inf) {
        inf = slopes[i];
        witness = pts[i];
      }
    }
    if (pts.empty()) est.empty_level = true;
    est.levels.push_back(inf);
    est.radii.push_back(eps);
    if (k + 1 == schedule.levels) {
      est.value = inf;
      est.witness = witness.empty() ? zbar : witness;
    }
  }
  est.monotone = levels_monotone(est.levels);
  est.local_min = est.value <= 0.0;
  return est;
}

}  // namespace varistab
