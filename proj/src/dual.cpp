#include "varistab/dual.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "varistab/errors.hpp"

namespace varistab {

// ---------------------------------------------------------------- GraphRep

GraphConstraint GraphConstraint::affine(Vector a, double b) {
  GraphConstraint c;
  c.value = [a, b](const Vector& z) { return dot(a, z) - b; };
  c.gradient = [a](const Vector&) { return a; };
  return c;
}

GraphRep::GraphRep(std::size_t dim_x, std::size_t dim_y, std::vector<GraphPiece> pieces)
    : dim_x_(dim_x), dim_y_(dim_y), pieces_(std::move(pieces)) {
  if (pieces_.empty()) throw ContractViolation("graph needs at least one piece");
}

GraphRep GraphRep::whole(std::size_t dim_x, std::size_t dim_y) { return GraphRep(dim_x, dim_y, {GraphPiece{}}); }

bool GraphRep::contains(const Vector& x, const Vector& y, double tol) const {
  return !pieces_at(concat(x, y), tol).empty();
}

std::vector<std::size_t> GraphRep::pieces_at(const Vector& z, double tol) const {
  require_dim(z, dim_x_ + dim_y_, "graph point");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    bool in = true;
    for (const auto& c : pieces_[i].constraints) {
      if (c.value(z) > tol) {
        in = false;
        break;
      }
    }
    if (in) out.push_back(i);
  }
  return out;
}

std::vector<Vector> GraphRep::normal_generators(std::size_t piece, const Vector& z, double tol) const {
  std::vector<Vector> out;
  for (const auto& c : pieces_.at(piece).constraints) {
    if (std::abs(c.value(z)) <= tol) out.push_back(c.gradient(z));
  }
  return out;
}

// ------------------------------------------------------ SubdifferentialRep

namespace {

bool near(const Vector& a, const Vector& b, double tol) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > tol * (1.0 + std::abs(a[i]))) return false;
  }
  return true;
}

bool is_zero(const Vector& v) {
  return std::all_of(v.begin(), v.end(), [](double c) { return std::abs(c) <= 1e-14; });
}

void dedupe(std::vector<Vector>& vs) {
  std::vector<Vector> out;
  for (auto& v : vs) {
    if (std::none_of(out.begin(), out.end(), [&](const Vector& w) { return near(w, v, 1e-12); })) {
      out.push_back(std::move(v));
    }
  }
  vs = std::move(out);
}

Vector unit_direction(const Vector& v) { return scale(v, 1.0 / euclidean_norm(v)); }

// min over conv(V) + cone(R) of a convex norm, by accelerated projected
// gradient on the squared Euclidean norm or projected subgradient otherwise.
void project_simplex(Vector& w) {
  Vector s = w;
  std::sort(s.begin(), s.end(), std::greater<>());
  double cum = 0.0, theta = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    cum += s[i];
    const double t = (cum - 1.0) / static_cast<double>(i + 1);
    if (s[i] - t > 0.0) theta = t;
  }
  for (auto& c : w) c = std::max(0.0, c - theta);
}

Vector combine(const std::vector<Vector>& vs, const std::vector<Vector>& rs, const Vector& lam, const Vector& mu,
               std::size_t dim) {
  Vector out(dim, 0.0);
  for (std::size_t i = 0; i < vs.size(); ++i) out = axpy(out, lam[i], vs[i]);
  for (std::size_t j = 0; j < rs.size(); ++j) out = axpy(out, mu[j], rs[j]);
  return out;
}

double min_norm_over(const std::vector<Vector>& vs, const std::vector<Vector>& rs, std::size_t dim,
                     const Metric& primal) {
  if (vs.empty()) return kInf;
  const std::size_t nv = vs.size(), nr = rs.size();
  if (nv == 1 && nr == 0) return primal.dual_norm(vs[0]);
  double lip = 0.0;
  for (const auto& v : vs) lip += dot(v, v);
  for (const auto& r : rs) lip += dot(r, r);
  lip = std::max(lip, 1e-300);
  Vector lam(nv, 1.0 / static_cast<double>(nv)), mu(nr, 0.0);
  double best = kInf;
  for (const auto& v : vs) best = std::min(best, primal.dual_norm(v));
  if (primal.is_euclidean()) {
    Vector lam_y = lam, mu_y = mu, lam_prev = lam, mu_prev = mu;
    double t = 1.0;
    for (int it = 0; it < 4000; ++it) {
      const Vector g = combine(vs, rs, lam_y, mu_y, dim);
      for (std::size_t i = 0; i < nv; ++i) lam[i] = lam_y[i] - dot(vs[i], g) / lip;
      for (std::size_t j = 0; j < nr; ++j) mu[j] = std::max(0.0, mu_y[j] - dot(rs[j], g) / lip);
      project_simplex(lam);
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      const double beta = (t - 1.0) / t_next;
      for (std::size_t i = 0; i < nv; ++i) lam_y[i] = lam[i] + beta * (lam[i] - lam_prev[i]);
      for (std::size_t j = 0; j < nr; ++j) mu_y[j] = std::max(0.0, mu[j] + beta * (mu[j] - mu_prev[j]));
      lam_prev = lam;
      mu_prev = mu;
      t = t_next;
      best = std::min(best, euclidean_norm(combine(vs, rs, lam, mu, dim)));
    }
    return best;
  }
  // Dual of a block sum norm: max of block norms; projected subgradient.
  const auto blocks = primal.block_sizes(dim);
  const double step0 = std::sqrt(lip);
  for (int it = 1; it <= 6000; ++it) {
    const Vector g = combine(vs, rs, lam, mu, dim);
    best = std::min(best, primal.dual_norm(g));
    // Subgradient: unit vector of the block attaining the max.
    std::size_t off = 0, arg = 0, arg_off = 0;
    double top = -1.0;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      const double n = euclidean_norm(slice(g, off, blocks[b]));
      if (n > top) {
        top = n;
        arg = b;
        arg_off = off;
      }
      off += blocks[b];
    }
    if (top <= 0.0) return 0.0;
    Vector s(dim, 0.0);
    for (std::size_t i = arg_off; i < arg_off + blocks[arg]; ++i) s[i] = g[i] / top;
    const double step = 1.0 / (step0 * std::sqrt(static_cast<double>(it)));
    for (std::size_t i = 0; i < nv; ++i) lam[i] -= step * dot(vs[i], s) * top;
    for (std::size_t j = 0; j < nr; ++j) mu[j] = std::max(0.0, mu[j] - step * dot(rs[j], s) * top);
    project_simplex(lam);
  }
  return best;
}

}  // namespace

SubdifferentialRep SubdifferentialRep::empty(std::size_t dim, bool off_domain) {
  SubdifferentialRep s(Kind::Empty, dim);
  s.off_domain_ = off_domain;
  return s;
}

SubdifferentialRep SubdifferentialRep::singleton(Vector v) {
  SubdifferentialRep s(Kind::Singleton, v.size());
  s.vertices_.push_back(std::move(v));
  return s;
}

SubdifferentialRep SubdifferentialRep::interval(double lo, double hi) {
  if (lo > hi) return empty(1);
  std::vector<Vector> vs, rs;
  if (std::isfinite(lo)) vs.push_back({lo});
  if (std::isfinite(hi)) vs.push_back({hi});
  if (vs.empty()) vs.push_back({0.0});
  if (!std::isfinite(lo)) rs.push_back({-1.0});
  if (!std::isfinite(hi)) rs.push_back({1.0});
  return polyhedron(1, std::move(vs), std::move(rs));
}

SubdifferentialRep SubdifferentialRep::ball(Vector center, double radius) {
  if (radius < 0.0) throw ContractViolation("ball radius must be nonnegative");
  if (radius == 0.0) return singleton(std::move(center));
  SubdifferentialRep s(Kind::Ball, center.size());
  s.vertices_.push_back(std::move(center));
  s.radius_ = radius;
  return s;
}

SubdifferentialRep SubdifferentialRep::cone(std::size_t dim, std::vector<Vector> generators) {
  return polyhedron(dim, {Vector(dim, 0.0)}, std::move(generators));
}

SubdifferentialRep SubdifferentialRep::polyhedron(std::size_t dim, std::vector<Vector> vertices,
                                                  std::vector<Vector> rays) {
  if (vertices.empty()) return empty(dim);
  for (const auto& v : vertices) require_dim(v, dim, "subdifferential vertex");
  std::vector<Vector> dirs;
  for (auto& r : rays) {
    require_dim(r, dim, "subdifferential ray");
    if (!is_zero(r)) dirs.push_back(unit_direction(r));
  }
  dedupe(vertices);
  dedupe(dirs);
  Kind kind;
  if (dim == 1 && !(vertices.size() == 1 && dirs.empty())) {
    kind = Kind::Interval;
  } else if (dirs.empty()) {
    kind = vertices.size() == 1 ? Kind::Singleton : Kind::Polytope;
  } else if (vertices.size() == 1 && is_zero(vertices[0])) {
    kind = Kind::Cone;
  } else {
    kind = Kind::Polyhedron;
  }
  SubdifferentialRep s(kind, dim);
  s.vertices_ = std::move(vertices);
  s.rays_ = std::move(dirs);
  if (kind == Kind::Interval) {
    // Keep only the two ends in one dimension.
    const double lo = s.lo(), hi = s.hi();
    s.vertices_.clear();
    s.rays_.clear();
    if (std::isfinite(lo)) s.vertices_.push_back({lo});
    if (std::isfinite(hi) && hi != lo) s.vertices_.push_back({hi});
    if (s.vertices_.empty()) s.vertices_.push_back({0.0});
    if (!std::isfinite(lo)) s.rays_.push_back({-1.0});
    if (!std::isfinite(hi)) s.rays_.push_back({1.0});
  }
  return s;
}

double SubdifferentialRep::lo() const {
  if (dim_ != 1) throw Unsupported("lo() is defined in one dimension only");
  if (is_empty()) return kInf;
  if (kind_ == Kind::Ball) return vertices_[0][0] - radius_;
  double v = kInf;
  for (const auto& p : vertices_) v = std::min(v, p[0]);
  for (const auto& r : rays_) {
    if (r[0] < 0.0) return -kInf;
  }
  return v;
}

double SubdifferentialRep::hi() const {
  if (dim_ != 1) throw Unsupported("hi() is defined in one dimension only");
  if (is_empty()) return -kInf;
  if (kind_ == Kind::Ball) return vertices_[0][0] + radius_;
  double v = -kInf;
  for (const auto& p : vertices_) v = std::max(v, p[0]);
  for (const auto& r : rays_) {
    if (r[0] > 0.0) return kInf;
  }
  return v;
}

double SubdifferentialRep::min_norm(const Metric& primal) const {
  switch (kind_) {
    case Kind::Empty:
      return kInf;
    case Kind::Singleton:
      return primal.dual_norm(vertices_[0]);
    case Kind::Ball:
      return std::max(0.0, euclidean_norm(vertices_[0]) - radius_);
    case Kind::Interval: {
      const double a = lo(), b = hi();
      if (a <= 0.0 && b >= 0.0) return 0.0;
      return std::min(std::abs(a), std::abs(b));
    }
    default:
      return min_norm_over(vertices_, rays_, dim_, primal);
  }
}

double SubdifferentialRep::max_norm(const Metric& primal) const {
  if (is_empty()) return 0.0;
  if (!rays_.empty()) return kInf;
  if (kind_ == Kind::Ball) return euclidean_norm(vertices_[0]) + radius_;
  double m = 0.0;
  for (const auto& v : vertices_) m = std::max(m, primal.dual_norm(v));
  return m;
}

SubdifferentialRep SubdifferentialRep::scaled(double t) const {
  if (!(t > 0.0)) throw ContractViolation("scaling factor must be positive");
  SubdifferentialRep s = *this;
  for (auto& v : s.vertices_) v = scale(v, t);
  s.radius_ *= t;
  return s;
}

bool SubdifferentialRep::contains(const Vector& v, double tol) const {
  require_dim(v, dim_, "subdifferential query");
  switch (kind_) {
    case Kind::Empty:
      return false;
    case Kind::Ball:
      return euclidean_norm(sub(v, vertices_[0])) <= radius_ + tol;
    case Kind::Interval:
      return v[0] >= lo() - tol && v[0] <= hi() + tol;
    default: {
      std::vector<Vector> shifted;
      for (const auto& p : vertices_) shifted.push_back(sub(p, v));
      return min_norm_over(shifted, rays_, dim_, Metric()) <= tol;
    }
  }
}

SubdifferentialRep SubdifferentialRep::plus(const SubdifferentialRep& other) const {
  if (other.dim_ != dim_) throw ContractViolation("Minkowski sum of sets of different dimension");
  if (is_empty() || other.is_empty()) return empty(dim_, off_domain_ || other.off_domain_);
  const bool trivial_other = other.kind_ == Kind::Singleton && is_zero(other.vertices_[0]);
  const bool trivial_this = kind_ == Kind::Singleton && is_zero(vertices_[0]);
  if (trivial_other) return *this;
  if (trivial_this) return other;
  if (kind_ == Kind::Ball || other.kind_ == Kind::Ball) {
    if (dim_ == 1) {
      return interval(lo() + other.lo(), hi() + other.hi());
    }
    throw Unsupported("Minkowski sum of a ball and a polyhedral set");
  }
  std::vector<Vector> vs, rs = rays_;
  for (const auto& a : vertices_) {
    for (const auto& b : other.vertices_) vs.push_back(add(a, b));
  }
  rs.insert(rs.end(), other.rays_.begin(), other.rays_.end());
  return polyhedron(dim_, std::move(vs), std::move(rs));
}

// ------------------------------------------------------- CatalogFunction

CatalogFunction CatalogFunction::smooth(std::size_t dim, Fn value, Grad gradient) {
  if (!value || !gradient) throw ContractViolation("smooth catalog function needs value and gradient");
  CatalogFunction f(Kind::Smooth, dim);
  f.values_.push_back(std::move(value));
  f.gradients_.push_back(std::move(gradient));
  return f;
}

CatalogFunction CatalogFunction::abs_affine(Vector a, double b) {
  CatalogFunction f(Kind::AbsAffine, a.size());
  f.a_ = std::move(a);
  f.b_ = b;
  return f;
}

CatalogFunction CatalogFunction::norm(Vector center) {
  CatalogFunction f(Kind::Norm, center.size());
  f.a_ = std::move(center);
  return f;
}

CatalogFunction CatalogFunction::max_of_smooth(std::size_t dim, std::vector<Fn> values, std::vector<Grad> gradients) {
  if (values.empty() || values.size() != gradients.size()) {
    throw ContractViolation("max of smooth functions needs matching values and gradients");
  }
  CatalogFunction f(Kind::MaxOfSmooth, dim);
  f.values_ = std::move(values);
  f.gradients_ = std::move(gradients);
  return f;
}

CatalogFunction CatalogFunction::polyhedron_indicator(std::size_t dim, std::vector<Halfspace> halfspaces) {
  CatalogFunction f(Kind::PolyhedronIndicator, dim);
  for (const auto& h : halfspaces) require_dim(h.normal, dim, "indicator halfspace");
  f.domain_ = std::move(halfspaces);
  return f;
}

CatalogFunction CatalogFunction::with_indicator(std::vector<Halfspace> halfspaces) const {
  CatalogFunction f = *this;
  for (auto& h : halfspaces) {
    require_dim(h.normal, dim_, "indicator halfspace");
    f.domain_.push_back(std::move(h));
  }
  return f;
}

CatalogFunction CatalogFunction::with_metric(Metric metric) const {
  CatalogFunction f = *this;
  f.metric_ = std::move(metric);
  return f;
}

double CatalogFunction::operator()(const Vector& x) const {
  require_dim(x, dim_, "catalog function argument");
  for (const auto& h : domain_) {
    if (dot(h.normal, x) - h.offset > kTolFeas) return kInf;
  }
  switch (kind_) {
    case Kind::Smooth:
      return values_[0](x);
    case Kind::AbsAffine:
      return std::abs(dot(a_, x) - b_);
    case Kind::Norm:
      return euclidean_norm(sub(x, a_));
    case Kind::MaxOfSmooth: {
      double m = -kInf;
      for (const auto& v : values_) m = std::max(m, v(x));
      return m;
    }
    case Kind::PolyhedronIndicator:
      return 0.0;
  }
  return 0.0;
}

SubdifferentialRep normal_cone(const std::vector<Halfspace>& halfspaces, const Vector& x, double tol) {
  std::vector<Vector> active;
  for (const auto& h : halfspaces) {
    const double slack = dot(h.normal, x) - h.offset;
    const double scale_tol = tol * std::max(1.0, euclidean_norm(h.normal));
    if (slack > scale_tol) throw NotOnGraph("normal cone requested at a point outside the polyhedron");
    if (slack >= -scale_tol) active.push_back(h.normal);
  }
  return SubdifferentialRep::cone(x.size(), std::move(active));
}

SubdifferentialRep CatalogFunction::subdifferential(const Vector& x) const {
  require_dim(x, dim_, "catalog function argument");
  for (const auto& h : domain_) {
    if (dot(h.normal, x) - h.offset > kTolFeas) return SubdifferentialRep::empty(dim_, true);
  }
  SubdifferentialRep base = SubdifferentialRep::singleton(Vector(dim_, 0.0));
  switch (kind_) {
    case Kind::Smooth:
      base = SubdifferentialRep::singleton(gradients_[0](x));
      break;
    case Kind::AbsAffine: {
      const double r = dot(a_, x) - b_;
      if (std::abs(r) <= 1e-12 * (1.0 + std::abs(b_))) {
        base = SubdifferentialRep::polyhedron(dim_, {a_, scale(a_, -1.0)}, {});
      } else {
        base = SubdifferentialRep::singleton(scale(a_, r > 0.0 ? 1.0 : -1.0));
      }
      break;
    }
    case Kind::Norm: {
      const Vector d = sub(x, a_);
      const double n = euclidean_norm(d);
      base = n <= 1e-14 ? SubdifferentialRep::ball(Vector(dim_, 0.0), 1.0) : SubdifferentialRep::singleton(scale(d, 1.0 / n));
      break;
    }
    case Kind::MaxOfSmooth: {
      Vector vals;
      double m = -kInf;
      for (const auto& v : values_) {
        vals.push_back(v(x));
        m = std::max(m, vals.back());
      }
      std::vector<Vector> grads;
      for (std::size_t i = 0; i < values_.size(); ++i) {
        if (vals[i] >= m - 1e-12 * (1.0 + std::abs(m))) grads.push_back(gradients_[i](x));
      }
      base = SubdifferentialRep::polyhedron(dim_, std::move(grads), {});
      break;
    }
    case Kind::PolyhedronIndicator:
      break;
  }
  if (domain_.empty()) return base;
  return base.plus(normal_cone(domain_, x));
}

ScalarMap CatalogFunction::as_scalar_map() const {
  ScalarMap g;
  g.value = [f = *this](const Vector& x) { return f(x); };
  g.metric = metric_;
  g.dim = dim_;
  if (!domain_.empty()) {
    g.retract = [hs = domain_](const Vector& x) {
      Vector out;
      if (!project_onto_polyhedron(hs, x, out)) throw NoProjection("catalog function has an empty domain");
      return out;
    };
  }
  return g;
}

SubdifferentialRep frechet_subdifferential(const CatalogFunction& fn, const Vector& x) { return fn.subdifferential(x); }

// ------------------------------------------------------------ Coderivative

namespace {

struct PieceSet {
  std::vector<Vector> vertices, rays;
};

// x*-set of one convex piece: x* = sum l_i a_i with sum l_i b_i = -y*, l >= 0,
// where (a_i, b_i) are the active gradients.
PieceSet piece_coderivative(const std::vector<Vector>& gens, std::size_t dx, std::size_t dy, const Vector& ystar) {
  const std::size_t m = gens.size();
  if (m > 12) throw Unsupported("coderivative: more than 12 active constraints");
  PieceSet out;
  const double yn = euclidean_norm(ystar);
  if (yn <= 1e-14) out.vertices.push_back(Vector(dx, 0.0));
  Eigen::VectorXd rhs(dy);
  for (std::size_t j = 0; j < dy; ++j) rhs[static_cast<Eigen::Index>(j)] = -ystar[j];
  for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < m; ++i) {
      if (mask & (1u << i)) idx.push_back(i);
    }
    if (idx.size() > dy + 1) continue;
    Eigen::MatrixXd bs(dy, idx.size());
    for (std::size_t c = 0; c < idx.size(); ++c) {
      for (std::size_t j = 0; j < dy; ++j) bs(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(c)) = gens[idx[c]][dx + j];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(bs);
    lu.setThreshold(1e-12);
    const auto rank = static_cast<std::size_t>(lu.rank());
    auto image = [&](const Eigen::VectorXd& lam) {
      Vector xs(dx, 0.0);
      for (std::size_t c = 0; c < idx.size(); ++c) {
        for (std::size_t i = 0; i < dx; ++i) xs[i] += lam[static_cast<Eigen::Index>(c)] * gens[idx[c]][i];
      }
      return xs;
    };
    if (rank == idx.size() && yn > 1e-14) {
      // Basic solution supported on idx.
      const Eigen::VectorXd lam = bs.colPivHouseholderQr().solve(rhs);
      if ((bs * lam - rhs).norm() > 1e-9 * (1.0 + yn)) continue;
      if (lam.minCoeff() < -1e-12) continue;
      out.vertices.push_back(image(lam));
    } else if (rank + 1 == idx.size()) {
      // Extreme ray of {l >= 0 : B l = 0} supported on idx.
      Eigen::VectorXd ker = lu.kernel().col(0);
      if (ker.sum() < 0.0) ker = -ker;
      if (ker.minCoeff() < -1e-12 * ker.cwiseAbs().maxCoeff()) continue;
      if (ker.minCoeff() <= 1e-12 * ker.cwiseAbs().maxCoeff() && idx.size() > 1) continue;
      Vector r = image(ker);
      if (!is_zero(r)) out.rays.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace

namespace {

std::vector<Vector> unit_dual_directions(std::size_t dy, const Metric& y_metric, bool& approximate) {
  std::vector<Vector> out;
  if (dy == 1) {
    out = {{1.0}, {-1.0}};
    approximate = false;
    return out;
  }
  approximate = true;
  for (auto& d : unit_directions(Metric(), dy, 256, 0)) {
    out.push_back(scale(d, 1.0 / y_metric.dual_norm(d)));
  }
  return out;
}

SubdifferentialRep xstar_set(const GraphRep& graph, const Vector& x, const Vector& y, const Vector& ystar) {
  const Vector z = concat(x, y);
  const auto pieces = graph.pieces_at(z, kTolFeas);
  if (pieces.empty()) throw NotOnGraph("coderivative requested at a point off the graph");
  const std::size_t dx = graph.dim_x(), dy = graph.dim_y();
  if (pieces.size() == 1) {
    PieceSet ps = piece_coderivative(graph.normal_generators(pieces[0], z), dx, dy, ystar);
    return SubdifferentialRep::polyhedron(dx, std::move(ps.vertices), std::move(ps.rays));
  }
  if (dx != 1) throw Unsupported("coderivative at a point shared by several pieces needs dim X = 1");
  double lo = -kInf, hi = kInf;
  for (std::size_t p : pieces) {
    PieceSet ps = piece_coderivative(graph.normal_generators(p, z), dx, dy, ystar);
    const SubdifferentialRep r = SubdifferentialRep::polyhedron(1, std::move(ps.vertices), std::move(ps.rays));
    if (r.is_empty()) return SubdifferentialRep::empty(1);
    lo = std::max(lo, r.lo());
    hi = std::min(hi, r.hi());
  }
  return SubdifferentialRep::interval(lo, hi);
}

}  // namespace

double outer_norm(const GraphRep& graph, const Vector& x, const Vector& y, const Metric& x_metric,
                  const Metric& y_metric, bool* approximate) {
  bool approx = false;
  double sup = 0.0;  // sup over an empty set is 0
  for (const auto& ys : unit_dual_directions(graph.dim_y(), y_metric, approx)) {
    sup = std::max(sup, xstar_set(graph, x, y, ys).max_norm(x_metric));
  }
  if (approximate) *approximate = approx;
  return sup;
}

CoderivativeResult coderivative_at(const GraphRep& graph, const Vector& x, const Vector& y, const Vector& ystar,
                                   const Metric& x_metric, const Metric& y_metric) {
  require_dim(x, graph.dim_x(), "coderivative x");
  require_dim(y, graph.dim_y(), "coderivative y");
  require_dim(ystar, graph.dim_y(), "coderivative y*");
  SubdifferentialRep xs = xstar_set(graph, x, y, ystar);
  bool approx = false;
  const double on = outer_norm(graph, x, y, x_metric, y_metric, &approx);
  return {ystar, std::move(xs), on, approx};
}

double min_coderivative_norm(const GraphRep& graph, const Vector& x, const Vector& y, const Metric& x_metric,
                             const Metric& y_metric) {
  bool approx = false;
  double inf = kInf;
  for (const auto& ys : unit_dual_directions(graph.dim_y(), y_metric, approx)) {
    inf = std::min(inf, xstar_set(graph, x, y, ys).min_norm(x_metric));
  }
  return inf;
}

// -------------------------------------------------------------- c constant

std::vector<std::pair<Vector, Vector>> sample_graph_points(const GenEqProblem& prob, double eps,
                                                           const RadiusSchedule& schedule, int level) {
  const std::size_t dx = prob.dims().x, dy = prob.dims().y;
  const Metric joint = Metric::blocks({dx, dy});
  const Vector zbar = concat(prob.x_ref(), prob.y_ref());
  const auto dirs = unit_directions(joint, dx + dy, static_cast<std::size_t>(schedule.samples_per_level),
                                    schedule.seed + static_cast<std::uint64_t>(level) * 104729u);
  std::vector<std::pair<Vector, Vector>> out;
  double frac = 1.0;
  for (int j = 0; j < 8; ++j, frac *= 0.5) {
    for (const auto& d : dirs) {
      const Vector z = axpy(zbar, frac * eps, d);
      Vector x = slice(z, 0, dx), y = slice(z, dx, dy);
      const ClosedSet value = prob.field()(prob.p_ref(), x);
      if (value.empty()) continue;
      y = value.project(y);
      if (prob.x_metric().distance(x, prob.x_ref()) > eps * (1 + 1e-9)) continue;
      if (prob.y_metric().distance(y, prob.y_ref()) > eps * (1 + 1e-9)) continue;
      out.emplace_back(std::move(x), std::move(y));
    }
  }
  return out;
}

CConstant c_constant(const GenEqProblem& prob, const RadiusSchedule& schedule) {
  schedule.validate();
  if (!prob.base().is_null()) throw ContractViolation("c_constant requires a null base");
  if (!prob.reference_graph()) throw ContractViolation("c_constant requires a polyhedral graph representation");
  const GraphRep& graph = *prob.reference_graph();
  CConstant out;
  for (int k = 0; k < schedule.levels; ++k) {
    const double eps = schedule.radius(k);
    std::vector<std::pair<Vector, Vector>> pts;
    for (auto& pt : sample_graph_points(prob, eps, schedule, k)) {
      if (prob.y_metric().norm(pt.second) > 1e-12) pts.push_back(std::move(pt));
    }
    std::vector<double> vals(pts.size(), kInf);
    parallel_for(pts.size(), [&](std::size_t i) {
      if (!graph.contains(pts[i].first, pts[i].second, 1e-8)) return;
      vals[i] = min_coderivative_norm(graph, pts[i].first, pts[i].second, prob.x_metric(), prob.y_metric());
    });
    double inf = kInf;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (vals[i] < inf) {
        inf = vals[i];
        out.witness = concat(pts[i].first, pts[i].second);
      }
    }
    out.sampled_points += pts.size();
    out.levels.push_back(inf);
  }
  out.value = out.levels.back();
  return out;
}

// ------------------------------------------- strict outer subdifferential

SlopeEstimate strict_outer_subdif_slope(const CatalogFunction& fn, const Vector& xbar, const RadiusSchedule& schedule) {
  schedule.validate();
  const ScalarMap g = fn.as_scalar_map();
  if (!std::isfinite(g(xbar))) throw DomainError("strict_outer_subdif_slope: function is not finite at the base point");
  SlopeEstimate est;
  for (int k = 0; k < schedule.levels; ++k) {
    const double eps = schedule.radius(k);
    const auto pts = qualifying_points(g, xbar, eps, schedule, k);
    std::vector<double> norms(pts.size());
    parallel_for(pts.size(), [&](std::size_t i) { norms[i] = fn.subdifferential(pts[i]).min_norm(fn.metric()); });
    double inf = kInf;
    Vector witness;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (norms[i] < inf) {
        inf = norms[i];
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
  est.monotone = true;
  for (std::size_t k = 1; k < est.levels.size(); ++k) {
    if (std::isfinite(est.levels[k]) && est.levels[k] < est.levels[k - 1] - 0.02 * std::max(1.0, est.levels[k - 1])) {
      est.monotone = false;
    }
  }
  est.local_min = est.value <= 0.0;
  return est;
}

}  // namespace varistab
