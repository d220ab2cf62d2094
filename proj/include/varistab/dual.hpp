#pragma once

// Fréchet subdifferentials of catalog functions, normal cones and coderivatives
// of graphs given by finitely many pieces, and the constants built from them.

#include <functional>
#include <optional>
#include <vector>

#include "varistab/geneq.hpp"
#include "varistab/graph.hpp"
#include "varistab/metric.hpp"
#include "varistab/sampling.hpp"
#include "varistab/slopes.hpp"

namespace varistab {

/// Closed convex set of dual vectors: conv(vertices) + cone(rays), or a ball.
class SubdifferentialRep {
 public:
  enum class Kind { Empty, Singleton, Interval, Ball, Cone, Polytope, Polyhedron };

  static SubdifferentialRep empty(std::size_t dim, bool off_domain = false);
  static SubdifferentialRep singleton(Vector v);
  /// [lo, hi] in one dimension; infinite ends allowed.
  static SubdifferentialRep interval(double lo, double hi);
  static SubdifferentialRep ball(Vector center, double radius);
  /// Cone generated by `generators` (contains 0).
  static SubdifferentialRep cone(std::size_t dim, std::vector<Vector> generators);
  /// conv(vertices) + cone(rays); kind is inferred. No vertex means empty.
  static SubdifferentialRep polyhedron(std::size_t dim, std::vector<Vector> vertices, std::vector<Vector> rays);

  Kind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  bool is_empty() const { return kind_ == Kind::Empty; }
  /// Set when the point was outside the domain of the function.
  bool off_domain() const { return off_domain_; }
  const std::vector<Vector>& vertices() const { return vertices_; }
  const std::vector<Vector>& rays() const { return rays_; }
  double ball_radius() const { return radius_; }

  /// Bounds in one dimension (lo > hi for the empty set).
  double lo() const;
  double hi() const;

  /// inf of the dual norm over the set; +inf when empty.
  double min_norm(const Metric& primal) const;
  /// sup of the dual norm over the set; 0 when empty, +inf with a nonzero ray.
  double max_norm(const Metric& primal) const;
  SubdifferentialRep scaled(double t) const;
  bool contains(const Vector& v, double tol = 1e-9) const;
  /// Minkowski sum (used for g + indicator).
  SubdifferentialRep plus(const SubdifferentialRep& other) const;

 private:
  SubdifferentialRep(Kind kind, std::size_t dim) : kind_(kind), dim_(dim) {}

  Kind kind_;
  std::size_t dim_;
  std::vector<Vector> vertices_;
  std::vector<Vector> rays_;
  double radius_ = 0.0;
  bool off_domain_ = false;
};

/// Scalar function from the analytic catalog, with exact Fréchet
/// subdifferential.
class CatalogFunction {
 public:
  enum class Kind { Smooth, AbsAffine, Norm, MaxOfSmooth, PolyhedronIndicator };
  using Fn = std::function<double(const Vector&)>;
  using Grad = std::function<Vector(const Vector&)>;

  static CatalogFunction smooth(std::size_t dim, Fn value, Grad gradient);
  /// |<a, x> - b|
  static CatalogFunction abs_affine(Vector a, double b);
  /// Euclidean norm |x - center|
  static CatalogFunction norm(Vector center);
  static CatalogFunction max_of_smooth(std::size_t dim, std::vector<Fn> values, std::vector<Grad> gradients);
  static CatalogFunction polyhedron_indicator(std::size_t dim, std::vector<Halfspace> halfspaces);

  /// This function plus the indicator of a polyhedron.
  CatalogFunction with_indicator(std::vector<Halfspace> halfspaces) const;
  /// Same function measured in another metric (norms of subgradients use its
  /// dual norm).
  CatalogFunction with_metric(Metric metric) const;

  Kind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  const Metric& metric() const { return metric_; }
  /// Value, +inf off the domain.
  double operator()(const Vector& x) const;
  SubdifferentialRep subdifferential(const Vector& x) const;
  /// Domain constraints (empty when the domain is the whole space).
  const std::vector<Halfspace>& domain() const { return domain_; }
  /// Scalar-map view; sampling is retracted onto the domain.
  ScalarMap as_scalar_map() const;

 private:
  CatalogFunction(Kind kind, std::size_t dim) : kind_(kind), dim_(dim) {}

  Kind kind_;
  std::size_t dim_;
  std::vector<Fn> values_;
  std::vector<Grad> gradients_;
  Vector a_;
  double b_ = 0.0;
  std::vector<Halfspace> domain_;
  Metric metric_;
};

SubdifferentialRep frechet_subdifferential(const CatalogFunction& fn, const Vector& x);

/// Fréchet normal cone of a polyhedron at x (throws NotOnGraph when x is not
/// in it).
SubdifferentialRep normal_cone(const std::vector<Halfspace>& halfspaces, const Vector& x, double tol = 1e-9);

struct CoderivativeResult {
  Vector ystar;
  SubdifferentialRep xstar;
  double outer_norm;
  bool outer_norm_approximate;
};

/// D*Phi(x, y)(y*) = {x* : (x*, -y*) in N((x, y), grph Phi)}.
/// Throws NotOnGraph when (x, y) is off the graph.
CoderivativeResult coderivative_at(const GraphRep& graph, const Vector& x, const Vector& y, const Vector& ystar,
                                   const Metric& x_metric = Metric(), const Metric& y_metric = Metric());

/// sup over |y*| = 1 of sup |x*|. Exact when dim Y = 1.
double outer_norm(const GraphRep& graph, const Vector& x, const Vector& y, const Metric& x_metric,
                  const Metric& y_metric, bool* approximate = nullptr);

/// inf over |y*| = 1 of inf |x*| at one graph point (+inf when every set is
/// empty).
double min_coderivative_norm(const GraphRep& graph, const Vector& x, const Vector& y, const Metric& x_metric,
                             const Metric& y_metric);

struct CConstant {
  std::vector<double> levels;
  double value = kInf;
  std::size_t sampled_points = 0;
  Vector witness;  // (x, y)
};

/// c[F(p_ref, .)](x_ref, 0). Requires a null base and a reference graph.
CConstant c_constant(const GenEqProblem& prob, const RadiusSchedule& schedule);

/// Per-level inf of the least-norm subgradient over qualifying points.
SlopeEstimate strict_outer_subdif_slope(const CatalogFunction& fn, const Vector& xbar,
                                        const RadiusSchedule& schedule);

/// Graph points (x, y) of F(p_ref, .) near (x_ref, y_ref) obtained by sampling
/// and projecting y onto F(p_ref, x).
std::vector<std::pair<Vector, Vector>> sample_graph_points(const GenEqProblem& prob, double eps,
                                                           const RadiusSchedule& schedule, int level);

}  // namespace varistab
