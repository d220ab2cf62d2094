#include "varistab/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>

#include "varistab/errors.hpp"

namespace varistab {

void RadiusSchedule::validate() const {
  if (!(eps0 > 0.0)) throw ContractViolation("schedule: eps0 must be positive");
  if (!(decay > 0.0 && decay < 1.0)) throw ContractViolation("schedule: decay must lie in (0,1)");
  if (levels < 3) throw ContractViolation("schedule: at least 3 levels required");
  if (samples_per_level < 64) throw ContractViolation("schedule: at least 64 samples per level required");
}

double RadiusSchedule::radius(int level) const { return eps0 * std::pow(decay, level); }

namespace {

constexpr unsigned kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

double radical_inverse(std::uint64_t n, unsigned base) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (n > 0) {
    r += static_cast<double>(n % base) * f;
    n /= base;
    f *= inv;
  }
  return r;
}

// splitmix64: fixed arithmetic, identical output everywhere.
std::uint64_t splitmix(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

HaltonSequence::HaltonSequence(std::size_t dim, std::uint64_t seed) : dim_(dim), shift_(dim, 0.0) {
  if (dim > std::size(kPrimes)) throw Unsupported("Halton sequence dimension above 16");
  if (seed != 0) {
    std::uint64_t state = seed;
    for (auto& s : shift_) s = static_cast<double>(splitmix(state) >> 11) * 0x1.0p-53;
  }
}

Vector HaltonSequence::next() {
  Vector u(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    double v = radical_inverse(index_, kPrimes[i]) + shift_[i];
    u[i] = v - std::floor(v);
  }
  ++index_;
  return u;
}

std::vector<Vector> unit_directions(const Metric& metric, std::size_t dim, std::size_t extra,
                                    std::uint64_t seed) {
  std::vector<Vector> dirs;
  for (std::size_t i = 0; i < dim; ++i) {
    dirs.push_back(unit_vector(dim, i, 1.0));
    dirs.push_back(unit_vector(dim, i, -1.0));
  }
  const std::vector<std::size_t> blocks = metric.block_sizes(dim);
  // One coordinate per axis plus one weight per block.
  HaltonSequence seq(dim + blocks.size(), seed);
  std::size_t produced = 0, attempts = 0;
  while (produced < extra && attempts < 20 * extra + 100) {
    ++attempts;
    const Vector u = seq.next();
    Vector d(dim);
    for (std::size_t i = 0; i < dim; ++i) d[i] = 2.0 * u[i] - 1.0;
    // Block weights on the simplex so that directions mixing blocks are unit
    // in the sum metric.
    double wsum = 0.0;
    Vector w(blocks.size());
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      w[b] = blocks.size() == 1 ? 1.0 : u[dim + b];
      wsum += w[b];
    }
    std::size_t offset = 0;
    bool degenerate = wsum <= 1e-12;
    for (std::size_t b = 0; b < blocks.size() && !degenerate; ++b) {
      double sq = 0.0;
      for (std::size_t i = offset; i < offset + blocks[b]; ++i) sq += d[i] * d[i];
      const double n = std::sqrt(sq);
      if (n < 1e-9) {
        degenerate = true;
        break;
      }
      for (std::size_t i = offset; i < offset + blocks[b]; ++i) d[i] *= (w[b] / wsum) / n;
      offset += blocks[b];
    }
    if (degenerate) continue;
    const double n = metric.norm(d);
    if (n <= 0.0) continue;
    dirs.push_back(scale(d, 1.0 / n));
    ++produced;
  }
  return dirs;
}

std::size_t worker_count() {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("VARISTAB_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap > 0) n = std::min<std::size_t>(n, static_cast<std::size_t>(cap));
  }
  return n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(workers);
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace varistab
