#pragma once

// Points, metrics and closed-set representations with exact distance
// evaluation.
//
// Extended reals are plain doubles: +inf / -inf follow IEEE arithmetic, which
// already gives r + inf = inf and min(r, inf) = r. Conventions used across the
// toolkit:
//   * distance to an empty set is +inf;
//   * the supremum over an empty sample in excess() is 0.

#include <cstddef>
#include <limits>
#include <variant>
#include <vector>

namespace varistab {

using Vector = std::vector<double>;
/// Row-major dense matrix, rows()[i] is row i.
using Matrix = std::vector<Vector>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kTolFeas = 1e-9;
inline constexpr double kTolProj = 1e-9;
inline constexpr std::size_t kGridBudget = 10'000'000;

// Vector arithmetic.
Vector add(const Vector& a, const Vector& b);
Vector sub(const Vector& a, const Vector& b);
Vector scale(const Vector& a, double t);
/// a + t * b
Vector axpy(const Vector& a, double t, const Vector& b);
double dot(const Vector& a, const Vector& b);
double euclidean_norm(const Vector& a);
Vector concat(const Vector& a, const Vector& b);
Vector slice(const Vector& a, std::size_t begin, std::size_t count);
Vector unit_vector(std::size_t dim, std::size_t axis, double sign = 1.0);

/// Throws ContractViolation when a coordinate is NaN or infinite.
void require_finite(const Vector& v, const char* what);
void require_dim(const Vector& v, std::size_t dim, const char* what);

/// Distance on R^n split into consecutive blocks: the Euclidean norms of the
/// blocks are summed. A single block is the plain Euclidean metric; products
/// of spaces always use the sum metric.
class Metric {
 public:
  /// Euclidean metric on a space of any dimension.
  Metric() = default;
  static Metric euclidean() { return Metric(); }
  static Metric blocks(std::vector<std::size_t> sizes);
  /// Sum metric on A x B, keeping the block structure of both factors.
  static Metric product(const Metric& a, std::size_t dim_a, const Metric& b, std::size_t dim_b);

  double distance(const Vector& a, const Vector& b) const;
  double norm(const Vector& v) const;
  /// Norm of the dual space: maximum of block Euclidean norms.
  double dual_norm(const Vector& v) const;

  bool is_euclidean() const { return sizes_.size() <= 1; }
  /// Block sizes resolved against a vector of dimension `dim`.
  std::vector<std::size_t> block_sizes(std::size_t dim) const;

 private:
  std::vector<std::size_t> sizes_;
};

struct Halfspace {
  Vector normal;  // a
  double offset;  // b, meaning <a, x> <= b
};

class ClosedSet;

namespace detail {
struct Cloud {
  std::vector<Vector> points;
  std::vector<double> sorted;  // coordinates in increasing order when dim == 1
};
struct Polyhedron {
  std::vector<Halfspace> halfspaces;
  bool empty = false;
};
struct Ball {
  Vector center;
  double radius;
};
struct Singleton {
  Vector point;
};
struct Box {
  Vector lo, hi;
};
struct Product {
  std::vector<ClosedSet> parts;
};
/// {y : |y| >= radius}
struct OutsideBall {
  double radius;
};
struct Union {
  std::vector<ClosedSet> branches;
};
}  // namespace detail

/// Closed subset of R^dim with an exact distance evaluator.
class ClosedSet {
 public:
  enum class Kind { Cloud, Polyhedron, Ball, Singleton, Box, Product, OutsideBall, Union };

  static ClosedSet cloud(std::vector<Vector> points, std::size_t dim);
  static ClosedSet polyhedron(std::vector<Halfspace> halfspaces, std::size_t dim);
  static ClosedSet ball(Vector center, double radius);
  static ClosedSet singleton(Vector point);
  static ClosedSet box(Vector lo, Vector hi);
  static ClosedSet interval(double lo, double hi) { return box({lo}, {hi}); }
  static ClosedSet whole_space(std::size_t dim);
  static ClosedSet product(std::vector<ClosedSet> parts);
  static ClosedSet outside_ball(std::size_t dim, double radius);
  static ClosedSet set_union(std::vector<ClosedSet> branches, std::size_t dim);

  Kind kind() const;
  std::size_t dim() const { return dim_; }
  bool empty() const;
  bool convex() const;

  /// Exact inf of the distance from y to the set; +inf for the empty set.
  double distance(const Vector& y) const;
  /// Nearest point of the set. Throws NoProjection when the set is empty.
  Vector project(const Vector& y) const;
  bool contains(const Vector& y, double tol = kTolFeas) const;
  /// Metric in which distance() is measured (sum metric for products).
  Metric metric() const;

  const detail::Polyhedron* as_polyhedron() const { return std::get_if<detail::Polyhedron>(&rep_); }
  const detail::Cloud* as_cloud() const { return std::get_if<detail::Cloud>(&rep_); }
  const detail::Box* as_box() const { return std::get_if<detail::Box>(&rep_); }

 private:
  using Rep = std::variant<detail::Cloud, detail::Polyhedron, detail::Ball, detail::Singleton,
                           detail::Box, detail::Product, detail::OutsideBall, detail::Union>;
  ClosedSet(Rep rep, std::size_t dim) : rep_(std::move(rep)), dim_(dim) {}

  Rep rep_;
  std::size_t dim_;
};

/// Euclidean projection onto an intersection of halfspaces (Dykstra's
/// algorithm followed by an active-set polish). Returns false when the
/// iteration cannot reach a feasible point, i.e. the polyhedron is empty.
bool project_onto_polyhedron(const std::vector<Halfspace>& halfspaces, const Vector& y, Vector& out);

double dist_to_set(const Vector& y, const ClosedSet& set);
Vector project_to_set(const Vector& y, const ClosedSet& set);

/// One-sided Hausdorff excess sup_{a in sample} dist(a, target); 0 for an
/// empty sample.
double excess(const std::vector<Vector>& sample, const ClosedSet& target);

/// Points of the axis-aligned grid lo + k * step inside [lo, hi]. Throws
/// BudgetExceeded above `budget` points.
std::vector<Vector> grid_points(const Vector& lo, const Vector& hi, double step,
                                std::size_t budget = kGridBudget);
/// Number of grid points grid_points() would produce.
std::size_t grid_size(const Vector& lo, const Vector& hi, double step);

}  // namespace varistab
