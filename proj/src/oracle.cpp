#include "varistab/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "varistab/errors.hpp"
#include "varistab/sampling.hpp"

namespace varistab {

std::vector<double> OracleGrid::radii() const {
  std::vector<double> r;
  double v = r0;
  for (int k = 0; k < scales; ++k, v *= ratio) r.push_back(v);
  return r;
}

const char* to_string(ModulusKind kind) {
  switch (kind) {
    case ModulusKind::LipLsc: return "liplsc";
    case ModulusKind::Calm: return "calm";
    case ModulusKind::UpperLipschitz: return "upper_lipschitz";
    case ModulusKind::Aubin: return "aubin";
  }
  return "?";
}

bool diverging_trace(const std::vector<double>& values) {
  if (values.size() < 5) return false;
  for (std::size_t k = values.size() - 4; k < values.size(); ++k) {
    const double prev = values[k - 1], cur = values[k];
    if (!(prev > 0.0) || !std::isfinite(prev)) return false;
    if (!(cur >= 1.5 * prev)) return false;
  }
  return true;
}

namespace {

struct GridPoint {
  Vector p;
  int scale;  // -1 for extra points, scales for the reference
};

std::vector<Vector> sample_points(const ClosedSet& set, const std::vector<Vector>& xgrid) {
  if (const auto* c = set.as_cloud()) return c->points;
  std::vector<Vector> out;
  if (set.empty()) return out;
  for (const auto& x : xgrid) {
    if (set.distance(x) <= kTolFeas) out.push_back(x);
  }
  return out;
}

}  // namespace

EmpiricalEstimate empirical_modulus(const SetValuedMap& map, ModulusKind kind, const OracleGrid& grid) {
  if (!map.value) throw ContractViolation("set-valued map has no evaluator");
  require_dim(grid.p_ref, map.p_dim, "oracle reference parameter");
  require_dim(grid.x_ref, map.x_dim, "oracle reference state");
  if (grid.scales < 1 || !(grid.r0 > 0.0) || !(grid.ratio > 0.0 && grid.ratio < 1.0)) {
    throw ContractViolation("oracle grid needs r0 > 0, ratio in (0,1) and at least one scale");
  }
  const auto radii = grid.radii();
  const auto dirs = unit_directions(map.p_metric, map.p_dim, grid.extra_dirs, grid.seed);
  std::vector<GridPoint> pts;
  for (int k = 0; k < grid.scales; ++k) {
    for (const auto& d : dirs) pts.push_back({axpy(grid.p_ref, radii[static_cast<std::size_t>(k)], d), k});
  }
  for (const auto& e : grid.extra_points) {
    require_dim(e, map.p_dim, "oracle extra parameter");
    if (map.p_metric.distance(e, grid.p_ref) <= 0.0) throw ContractViolation("oracle grid must exclude the reference parameter");
    pts.push_back({e, -1});
  }

  const bool needs_samples = kind != ModulusKind::LipLsc;
  std::vector<Vector> xgrid;
  if (needs_samples) xgrid = grid_points(map.x_region.lo, map.x_region.hi, map.x_step);

  std::vector<ClosedSet> values(pts.size(), ClosedSet::cloud({}, map.x_dim));
  parallel_for(pts.size(), [&](std::size_t i) { values[i] = map.value(pts[i].p); });
  const ClosedSet ref_value = map.value(grid.p_ref);
  if (kind == ModulusKind::Calm && ref_value.empty()) {
    throw ContractViolation("calmness needs a nonempty value at the reference parameter");
  }

  EmpiricalEstimate est;
  est.kind = kind;
  est.x_step = needs_samples ? map.x_step : 0.0;
  est.delta = (kind == ModulusKind::Calm || kind == ModulusKind::Aubin) ? grid.delta : kInf;
  est.scale_radius = radii;
  est.scale_value.assign(radii.size(), 0.0);
  est.witness = {grid.p_ref, {}, grid.x_ref, 0, 0.0};

  const bool localized = kind == ModulusKind::Calm || kind == ModulusKind::Aubin;
  auto localized_samples = [&](const ClosedSet& set) {
    std::vector<Vector> s = sample_points(set, xgrid);
    if (localized) {
      s.erase(std::remove_if(s.begin(), s.end(),
                             [&](const Vector& x) { return map.x_metric.distance(x, grid.x_ref) > grid.delta + 1e-12; }),
              s.end());
    }
    return s;
  };

  // Sup of dist(x, target) / dp over x in `from`, with the maximizing x.
  auto sup_quotient = [&](const std::vector<Vector>& from, const ClosedSet& target, double dp, Vector& arg) {
    double best = 0.0;
    for (const auto& x : from) {
      const double q = target.distance(x) / dp;
      if (q > best || arg.empty()) {
        best = std::max(best, q);
        arg = x;
      }
    }
    return best;
  };

  if (kind == ModulusKind::Aubin) {
    std::vector<GridPoint> all = pts;
    all.insert(all.begin(), {grid.p_ref, grid.scales});
    std::vector<ClosedSet> vals = values;
    vals.insert(vals.begin(), ref_value);
    std::vector<std::vector<Vector>> samples(all.size());
    parallel_for(all.size(), [&](std::size_t i) { samples[i] = localized_samples(vals[i]); });
    const std::size_t n = all.size();
    std::vector<Quotient> qs(n * n);
    parallel_for(n * n, [&](std::size_t idx) {
      const std::size_t i = idx / n, j = idx % n;
      Quotient q{all[i].p, all[j].p, {}, -2, 0.0};
      if (i == j) return;
      const double dp = map.p_metric.distance(all[i].p, all[j].p);
      if (dp <= 0.0) return;
      q.value = sup_quotient(samples[i], vals[j], dp, q.x);
      int si = all[i].scale, sj = all[j].scale;
      if (si == grid.scales) si = sj;
      if (sj == grid.scales) sj = si;
      q.scale = (si < 0 || sj < 0) ? -1 : std::max(si, sj);
      qs[idx] = std::move(q);
    });
    for (auto& q : qs) {
      if (q.scale == -2) continue;
      if (q.scale >= 0) {
        auto& v = est.scale_value[static_cast<std::size_t>(q.scale)];
        v = std::max(v, q.value);
      }
      if (q.value > est.witness.value) est.witness = q;
      est.value = std::max(est.value, q.value);
      est.quotients.push_back(std::move(q));
    }
  } else {
    std::vector<Quotient> qs(pts.size());
    parallel_for(pts.size(), [&](std::size_t i) {
      Quotient q{pts[i].p, {}, {}, pts[i].scale, 0.0};
      const double dp = map.p_metric.distance(pts[i].p, grid.p_ref);
      if (kind == ModulusKind::LipLsc) {
        const double d = values[i].distance(grid.x_ref);
        q.value = d / dp;
        if (std::isfinite(d)) q.x = values[i].project(grid.x_ref);
      } else {
        q.value = sup_quotient(localized_samples(values[i]), ref_value, dp, q.x);
      }
      qs[i] = std::move(q);
    });
    for (auto& q : qs) {
      if (q.scale >= 0) {
        auto& v = est.scale_value[static_cast<std::size_t>(q.scale)];
        v = std::max(v, q.value);
      }
      if (q.value > est.witness.value) est.witness = q;
      est.value = std::max(est.value, q.value);
      est.quotients.push_back(std::move(q));
    }
  }
  est.diverging = diverging_trace(est.scale_value);
  if (est.diverging) est.value = kInf;
  return est;
}

Verdict verdict_compare(double bound, const EmpiricalEstimate& empirical, double slack, double spacing) {
  const double threshold = bound * (1.0 + slack) + spacing;
  return {empirical.value <= threshold, bound, empirical.value, threshold, empirical.witness};
}

SetValuedMap solution_map(const GenEqProblem& prob, double step, double tol) {
  SetValuedMap m;
  m.value = [prob, step, tol](const Vector& p) {
    SolutionSample s = solve_on_grid(prob, p, prob.x_region(), step, tol);
    return ClosedSet::cloud(std::move(s.points), prob.dims().x);
  };
  m.p_dim = prob.dims().p;
  m.x_dim = prob.dims().x;
  m.p_metric = prob.p_metric();
  m.x_metric = prob.x_metric();
  m.x_region = prob.x_region();
  m.x_step = step;
  return m;
}

}  // namespace varistab
