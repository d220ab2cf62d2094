#include "varistab/metric.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "varistab/errors.hpp"

namespace varistab {

Vector add(const Vector& a, const Vector& b) {
  Vector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

Vector sub(const Vector& a, const Vector& b) {
  Vector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

Vector scale(const Vector& a, double t) {
  Vector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = t * a[i];
  return r;
}

Vector axpy(const Vector& a, double t, const Vector& b) {
  Vector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + t * b[i];
  return r;
}

double dot(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double euclidean_norm(const Vector& a) { return std::sqrt(dot(a, a)); }

Vector concat(const Vector& a, const Vector& b) {
  Vector r(a);
  r.insert(r.end(), b.begin(), b.end());
  return r;
}

Vector slice(const Vector& a, std::size_t begin, std::size_t count) {
  return Vector(a.begin() + static_cast<std::ptrdiff_t>(begin),
                a.begin() + static_cast<std::ptrdiff_t>(begin + count));
}

Vector unit_vector(std::size_t dim, std::size_t axis, double sign) {
  Vector e(dim, 0.0);
  e[axis] = sign;
  return e;
}

void require_finite(const Vector& v, const char* what) {
  for (double c : v) {
    if (!std::isfinite(c)) throw ContractViolation(std::string(what) + ": non-finite coordinate");
  }
}

void require_dim(const Vector& v, std::size_t dim, const char* what) {
  if (v.size() != dim) {
    throw ContractViolation(std::string(what) + ": dimension " + std::to_string(v.size()) +
                            ", expected " + std::to_string(dim));
  }
}

// ---------------------------------------------------------------------------
// Metric

Metric Metric::blocks(std::vector<std::size_t> sizes) {
  Metric m;
  m.sizes_ = std::move(sizes);
  return m;
}

Metric Metric::product(const Metric& a, std::size_t dim_a, const Metric& b, std::size_t dim_b) {
  std::vector<std::size_t> sizes = a.block_sizes(dim_a);
  for (std::size_t s : b.block_sizes(dim_b)) sizes.push_back(s);
  return blocks(std::move(sizes));
}

std::vector<std::size_t> Metric::block_sizes(std::size_t dim) const {
  if (sizes_.empty()) return {dim};
  if (std::accumulate(sizes_.begin(), sizes_.end(), std::size_t{0}) != dim) {
    throw ContractViolation("metric block sizes do not match dimension " + std::to_string(dim));
  }
  return sizes_;
}

double Metric::norm(const Vector& v) const {
  double total = 0.0;
  std::size_t offset = 0;
  for (std::size_t s : block_sizes(v.size())) {
    double sq = 0.0;
    for (std::size_t i = offset; i < offset + s; ++i) sq += v[i] * v[i];
    total += std::sqrt(sq);
    offset += s;
  }
  return total;
}

double Metric::dual_norm(const Vector& v) const {
  double best = 0.0;
  std::size_t offset = 0;
  for (std::size_t s : block_sizes(v.size())) {
    double sq = 0.0;
    for (std::size_t i = offset; i < offset + s; ++i) sq += v[i] * v[i];
    best = std::max(best, std::sqrt(sq));
    offset += s;
  }
  return best;
}

double Metric::distance(const Vector& a, const Vector& b) const { return norm(sub(a, b)); }

// ---------------------------------------------------------------------------
// Polyhedron projection

namespace {

double max_violation(const std::vector<Halfspace>& hs, const Vector& x) {
  double worst = 0.0;
  for (const auto& h : hs) worst = std::max(worst, dot(h.normal, x) - h.offset);
  return worst;
}

Vector project_halfspace(const Halfspace& h, const Vector& z) {
  const double excess = dot(h.normal, z) - h.offset;
  if (excess <= 0.0) return z;
  const double nn = dot(h.normal, h.normal);
  if (nn == 0.0) return z;
  return axpy(z, -excess / nn, h.normal);
}

// Exact projection onto the affine hull of the constraints in `active`,
// accepted only when it is feasible and all multipliers are nonnegative.
bool polish(const std::vector<Halfspace>& hs, const Vector& y, const Vector& approx, Vector& out) {
  const std::size_t n = y.size();
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    if (std::abs(dot(hs[i].normal, approx) - hs[i].offset) <= 1e-7) active.push_back(i);
  }
  if (active.empty()) return false;
  Eigen::MatrixXd a(active.size(), n);
  Eigen::VectorXd rhs(active.size());
  Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < active.size(); ++r) {
    for (std::size_t c = 0; c < n; ++c) a(r, c) = hs[active[r]].normal[c];
    rhs(r) = hs[active[r]].offset;
  }
  const Eigen::MatrixXd gram = a * a.transpose();
  const Eigen::VectorXd lambda =
      gram.completeOrthogonalDecomposition().solve(a * yv - rhs);
  if (lambda.minCoeff() < -1e-10) return false;
  const Eigen::VectorXd z = yv - a.transpose() * lambda;
  Vector cand(z.data(), z.data() + n);
  if (max_violation(hs, cand) > 1e-12) return false;
  out = std::move(cand);
  return true;
}

}  // namespace

bool project_onto_polyhedron(const std::vector<Halfspace>& hs, const Vector& y, Vector& out) {
  if (hs.empty()) {
    out = y;
    return true;
  }
  if (max_violation(hs, y) <= 0.0) {
    out = y;
    return true;
  }
  Vector x = y;
  std::vector<Vector> increments(hs.size(), Vector(y.size(), 0.0));
  constexpr int kMaxSweeps = 200000;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double change = 0.0;
    for (std::size_t i = 0; i < hs.size(); ++i) {
      const Vector z = add(x, increments[i]);
      const Vector next = project_halfspace(hs[i], z);
      increments[i] = sub(z, next);
      change = std::max(change, euclidean_norm(sub(next, x)));
      x = next;
    }
    if (change < 1e-15 * (1.0 + euclidean_norm(x)) && max_violation(hs, x) <= 1e-12) break;
    // Polish early once the active set has settled.
    if (sweep % 64 == 63 && max_violation(hs, x) <= 1e-9 && polish(hs, y, x, out)) return true;
  }
  if (max_violation(hs, x) > kTolFeas) return false;
  if (polish(hs, y, x, out)) return true;
  out = std::move(x);
  return true;
}

// ---------------------------------------------------------------------------
// ClosedSet construction

ClosedSet ClosedSet::cloud(std::vector<Vector> points, std::size_t dim) {
  for (const auto& p : points) {
    require_dim(p, dim, "cloud point");
    require_finite(p, "cloud point");
  }
  detail::Cloud c{std::move(points), {}};
  if (dim == 1) {
    for (const auto& p : c.points) c.sorted.push_back(p[0]);
    std::sort(c.sorted.begin(), c.sorted.end());
  }
  return ClosedSet(std::move(c), dim);
}

ClosedSet ClosedSet::polyhedron(std::vector<Halfspace> halfspaces, std::size_t dim) {
  for (const auto& h : halfspaces) require_dim(h.normal, dim, "halfspace normal");
  detail::Polyhedron poly{std::move(halfspaces), false};
  Vector probe;
  poly.empty = !project_onto_polyhedron(poly.halfspaces, Vector(dim, 0.0), probe);
  return ClosedSet(std::move(poly), dim);
}

ClosedSet ClosedSet::ball(Vector center, double radius) {
  if (!(radius >= 0.0)) throw ContractViolation("ball radius must be nonnegative");
  require_finite(center, "ball center");
  const std::size_t d = center.size();
  return ClosedSet(detail::Ball{std::move(center), radius}, d);
}

ClosedSet ClosedSet::singleton(Vector point) {
  require_finite(point, "singleton");
  const std::size_t d = point.size();
  return ClosedSet(detail::Singleton{std::move(point)}, d);
}

ClosedSet ClosedSet::box(Vector lo, Vector hi) {
  if (lo.size() != hi.size()) throw ContractViolation("box bounds differ in dimension");
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (std::isnan(lo[i]) || std::isnan(hi[i])) throw ContractViolation("box bound is NaN");
  }
  const std::size_t d = lo.size();
  return ClosedSet(detail::Box{std::move(lo), std::move(hi)}, d);
}

ClosedSet ClosedSet::whole_space(std::size_t dim) {
  return box(Vector(dim, -kInf), Vector(dim, kInf));
}

ClosedSet ClosedSet::product(std::vector<ClosedSet> parts) {
  std::size_t d = 0;
  for (const auto& p : parts) d += p.dim();
  return ClosedSet(detail::Product{std::move(parts)}, d);
}

ClosedSet ClosedSet::outside_ball(std::size_t dim, double radius) {
  if (!(radius >= 0.0)) throw ContractViolation("outside_ball radius must be nonnegative");
  return ClosedSet(detail::OutsideBall{radius}, dim);
}

ClosedSet ClosedSet::set_union(std::vector<ClosedSet> branches, std::size_t dim) {
  for (const auto& b : branches) {
    if (b.dim() != dim) throw ContractViolation("union branch dimension mismatch");
  }
  return ClosedSet(detail::Union{std::move(branches)}, dim);
}

ClosedSet::Kind ClosedSet::kind() const { return static_cast<Kind>(rep_.index()); }

bool ClosedSet::empty() const {
  struct Visitor {
    bool operator()(const detail::Cloud& c) const { return c.points.empty(); }
    bool operator()(const detail::Polyhedron& p) const { return p.empty; }
    bool operator()(const detail::Ball&) const { return false; }
    bool operator()(const detail::Singleton&) const { return false; }
    bool operator()(const detail::Box& b) const {
      for (std::size_t i = 0; i < b.lo.size(); ++i) {
        if (b.lo[i] > b.hi[i] || b.lo[i] == kInf || b.hi[i] == -kInf) return true;
      }
      return false;
    }
    bool operator()(const detail::Product& p) const {
      return std::any_of(p.parts.begin(), p.parts.end(), [](const ClosedSet& s) { return s.empty(); });
    }
    bool operator()(const detail::OutsideBall&) const { return false; }
    bool operator()(const detail::Union& u) const {
      return std::all_of(u.branches.begin(), u.branches.end(), [](const ClosedSet& s) { return s.empty(); });
    }
  };
  return std::visit(Visitor{}, rep_);
}

bool ClosedSet::convex() const {
  switch (kind()) {
    case Kind::Cloud: return as_cloud()->points.size() <= 1;
    case Kind::OutsideBall: return std::get<detail::OutsideBall>(rep_).radius == 0.0;
    case Kind::Union: return false;
    case Kind::Product: {
      const auto& parts = std::get<detail::Product>(rep_).parts;
      return std::all_of(parts.begin(), parts.end(), [](const ClosedSet& s) { return s.convex(); });
    }
    default: return true;
  }
}

Metric ClosedSet::metric() const {
  if (const auto* prod = std::get_if<detail::Product>(&rep_)) {
    std::vector<std::size_t> sizes;
    for (const auto& part : prod->parts) {
      for (std::size_t s : part.metric().block_sizes(part.dim())) sizes.push_back(s);
    }
    return Metric::blocks(std::move(sizes));
  }
  return Metric::euclidean();
}

// ---------------------------------------------------------------------------
// Projection and distance

Vector ClosedSet::project(const Vector& y) const {
  require_dim(y, dim_, "project_to_set");
  if (empty()) throw NoProjection("projection onto an empty set");
  struct Visitor {
    const Vector& y;
    Vector operator()(const detail::Cloud& c) const {
      const Vector* best = &c.points.front();
      double best_d = kInf;
      for (const auto& p : c.points) {
        double d = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) d += (p[i] - y[i]) * (p[i] - y[i]);
        if (d < best_d) {
          best_d = d;
          best = &p;
        }
      }
      return *best;
    }
    Vector operator()(const detail::Polyhedron& p) const {
      Vector out;
      if (!project_onto_polyhedron(p.halfspaces, y, out)) throw NoProjection("empty polyhedron");
      return out;
    }
    Vector operator()(const detail::Ball& b) const {
      const Vector d = sub(y, b.center);
      const double n = euclidean_norm(d);
      if (n <= b.radius) return y;
      return axpy(b.center, b.radius / n, d);
    }
    Vector operator()(const detail::Singleton& s) const { return s.point; }
    Vector operator()(const detail::Box& b) const {
      Vector r(y);
      for (std::size_t i = 0; i < r.size(); ++i) r[i] = std::clamp(r[i], b.lo[i], b.hi[i]);
      return r;
    }
    Vector operator()(const detail::Product& p) const {
      Vector r;
      std::size_t offset = 0;
      for (const auto& part : p.parts) {
        const Vector piece = part.project(slice(y, offset, part.dim()));
        r.insert(r.end(), piece.begin(), piece.end());
        offset += part.dim();
      }
      return r;
    }
    Vector operator()(const detail::OutsideBall& o) const {
      const double n = euclidean_norm(y);
      if (n >= o.radius) return y;
      // Ties at the origin resolve to +radius along the first axis.
      if (n == 0.0) return unit_vector(y.size(), 0, o.radius);
      return scale(y, o.radius / n);
    }
    Vector operator()(const detail::Union& u) const {
      Vector best;
      double best_d = kInf;
      for (const auto& b : u.branches) {
        if (b.empty()) continue;
        Vector cand = b.project(y);
        const double d = euclidean_norm(sub(cand, y));
        if (d < best_d) {
          best_d = d;
          best = std::move(cand);
        }
      }
      return best;
    }
  };
  return std::visit(Visitor{y}, rep_);
}

double ClosedSet::distance(const Vector& y) const {
  require_dim(y, dim_, "dist_to_set");
  if (empty()) return kInf;
  switch (kind()) {
    case Kind::Box: {
      const auto& b = *as_box();
      double sq = 0.0;
      for (std::size_t i = 0; i < y.size(); ++i) {
        double d = 0.0;
        if (y[i] < b.lo[i]) d = b.lo[i] - y[i];
        if (y[i] > b.hi[i]) d = y[i] - b.hi[i];
        sq += d * d;
      }
      return std::sqrt(sq);
    }
    case Kind::OutsideBall:
      return std::max(0.0, std::get<detail::OutsideBall>(rep_).radius - euclidean_norm(y));
    case Kind::Ball: {
      const auto& b = std::get<detail::Ball>(rep_);
      return std::max(0.0, euclidean_norm(sub(y, b.center)) - b.radius);
    }
    case Kind::Product: {
      double total = 0.0;
      std::size_t offset = 0;
      for (const auto& part : std::get<detail::Product>(rep_).parts) {
        total += part.distance(slice(y, offset, part.dim()));
        offset += part.dim();
      }
      return total;
    }
    case Kind::Union: {
      double best = kInf;
      for (const auto& b : std::get<detail::Union>(rep_).branches) best = std::min(best, b.distance(y));
      return best;
    }
    case Kind::Cloud: {
      const auto& c = *as_cloud();
      if (dim_ != 1) break;
      // Nearest neighbour by bisection on the sorted coordinates.
      const auto it = std::lower_bound(c.sorted.begin(), c.sorted.end(), y[0]);
      double best = kInf;
      if (it != c.sorted.end()) best = *it - y[0];
      if (it != c.sorted.begin()) best = std::min(best, y[0] - *std::prev(it));
      return best;
    }
    case Kind::Polyhedron:
      if (max_violation(as_polyhedron()->halfspaces, y) <= 0.0) return 0.0;
      [[fallthrough]];
    default:
      break;
  }
  return euclidean_norm(sub(project(y), y));
}

bool ClosedSet::contains(const Vector& y, double tol) const { return distance(y) <= tol; }

double dist_to_set(const Vector& y, const ClosedSet& set) { return set.distance(y); }

Vector project_to_set(const Vector& y, const ClosedSet& set) { return set.project(y); }

double excess(const std::vector<Vector>& sample, const ClosedSet& target) {
  double worst = 0.0;
  for (const auto& a : sample) worst = std::max(worst, target.distance(a));
  return worst;
}

// ---------------------------------------------------------------------------
// Grids

namespace {
std::size_t axis_count(double lo, double hi, double step) {
  if (hi < lo) return 0;
  return static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
}
}  // namespace

std::size_t grid_size(const Vector& lo, const Vector& hi, double step) {
  if (!(step > 0.0)) throw ContractViolation("grid step must be positive");
  require_finite(lo, "grid lower corner");
  require_finite(hi, "grid upper corner");
  double total = 1.0;
  for (std::size_t i = 0; i < lo.size(); ++i) total *= static_cast<double>(axis_count(lo[i], hi[i], step));
  return total > 1e18 ? static_cast<std::size_t>(1e18) : static_cast<std::size_t>(total);
}

std::vector<Vector> grid_points(const Vector& lo, const Vector& hi, double step, std::size_t budget) {
  const std::size_t total = grid_size(lo, hi, step);
  if (total > budget) {
    throw BudgetExceeded("grid of " + std::to_string(total) + " points exceeds budget " +
                         std::to_string(budget));
  }
  std::vector<std::size_t> counts(lo.size());
  for (std::size_t i = 0; i < lo.size(); ++i) counts[i] = axis_count(lo[i], hi[i], step);
  std::vector<Vector> pts;
  pts.reserve(total);
  std::vector<std::size_t> idx(lo.size(), 0);
  for (std::size_t n = 0; n < total; ++n) {
    Vector p(lo.size());
    for (std::size_t i = 0; i < lo.size(); ++i) p[i] = lo[i] + static_cast<double>(idx[i]) * step;
    pts.push_back(std::move(p));
    for (std::size_t i = lo.size(); i-- > 0;) {
      if (++idx[i] < counts[i]) break;
      idx[i] = 0;
    }
  }
  return pts;
}

}  // namespace varistab
