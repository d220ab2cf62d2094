#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "varistab/metric.hpp"

namespace varistab {

/// Inequality g(z) <= 0 on the graph space z = (x, y), with its gradient.
struct GraphConstraint {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;

  /// <a, z> <= b
  static GraphConstraint affine(Vector a, double b);
};

/// One piece of a graph: the intersection of its constraints.
struct GraphPiece {
  std::vector<GraphConstraint> constraints;
};

/// Graph of a set-valued mapping X -> 2^Y given as a finite union of pieces
/// cut out by inequalities. Affine pieces give polyhedral graphs; smooth
/// constraints are treated through their linearization at the point, which is
/// exact under linear independence of the active gradients.
class GraphRep {
 public:
  GraphRep(std::size_t dim_x, std::size_t dim_y, std::vector<GraphPiece> pieces);

  /// Graph of the whole product X x Y (one piece without constraints).
  static GraphRep whole(std::size_t dim_x, std::size_t dim_y);

  std::size_t dim_x() const { return dim_x_; }
  std::size_t dim_y() const { return dim_y_; }
  const std::vector<GraphPiece>& pieces() const { return pieces_; }

  bool contains(const Vector& x, const Vector& y, double tol = kTolFeas) const;
  /// Indices of the pieces containing (x, y).
  std::vector<std::size_t> pieces_at(const Vector& z, double tol = kTolFeas) const;
  /// Gradients of the constraints of `piece` active at z; their conic hull is
  /// the normal cone of the piece at z.
  std::vector<Vector> normal_generators(std::size_t piece, const Vector& z, double tol = 1e-8) const;

 private:
  std::size_t dim_x_, dim_y_;
  std::vector<GraphPiece> pieces_;
};

}  // namespace varistab
