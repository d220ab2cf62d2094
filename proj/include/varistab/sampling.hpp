#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "varistab/metric.hpp"

namespace varistab {

/// Shrinking radii eps_k = eps0 * decay^k used to approximate limits as the
/// radius goes to zero.
struct RadiusSchedule {
  double eps0 = 0.1;
  double decay = 0.5;
  int levels = 8;
  int samples_per_level = 64;
  std::uint64_t seed = 0;

  /// Throws ContractViolation on eps0 <= 0, decay outside (0,1), levels < 3 or
  /// samples_per_level < 64.
  void validate() const;
  double radius(int level) const;
};

/// Halton sequence with a Cranley-Patterson rotation derived from the seed.
/// Output is bit-reproducible across platforms.
class HaltonSequence {
 public:
  HaltonSequence(std::size_t dim, std::uint64_t seed);
  /// Next point of [0,1)^dim.
  Vector next();

 private:
  std::size_t dim_;
  std::uint64_t index_ = 1;
  Vector shift_;
};

/// Deterministic set of unit directions (unit in `metric`) in R^dim: the 2*dim
/// signed coordinate axes first, then `extra` quasi-random directions.
std::vector<Vector> unit_directions(const Metric& metric, std::size_t dim, std::size_t extra,
                                    std::uint64_t seed);

/// Worker count: hardware concurrency, capped by the VARISTAB_THREADS
/// environment variable when set.
std::size_t worker_count();

/// Runs body(i) for i in [0, n) across worker threads. Each index is processed
/// exactly once; callers write results into per-index slots.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace varistab
