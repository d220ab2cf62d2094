#include <doctest.h>

#include <atomic>
#include <cstdlib>

#include "varistab/errors.hpp"
#include "varistab/sampling.hpp"

using namespace varistab;

TEST_CASE("radius schedule") {
  RadiusSchedule s;
  CHECK(s.radius(0) == doctest::Approx(0.1));
  CHECK(s.radius(3) == doctest::Approx(0.0125));
  s.decay = 1.0;
  CHECK_THROWS_AS(s.validate(), ContractViolation);
  s.decay = 0.5;
  s.levels = 0;
  CHECK_THROWS_AS(s.validate(), ContractViolation);
}

TEST_CASE("halton sequence is deterministic and fills the unit cube") {
  HaltonSequence a(3, 42), b(3, 42), c(3, 43);
  bool differs = false;
  double mean = 0.0;
  for (int i = 0; i < 512; ++i) {
    const Vector u = a.next(), v = b.next(), w = c.next();
    CHECK(u == v);
    differs = differs || u != w;
    for (double t : u) {
      CHECK(t >= 0.0);
      CHECK(t < 1.0);
    }
    mean += u[0] / 512.0;
  }
  CHECK(differs);
  CHECK(mean == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("unit directions have unit norm in the metric") {
  const Metric m = Metric::blocks({1, 2});
  const auto dirs = unit_directions(m, 3, 10, 5);
  CHECK(dirs.size() >= 16);
  for (const auto& d : dirs) CHECK(m.norm(d) == doctest::Approx(1.0));
  CHECK(unit_directions(Metric(), 1, 0, 0).size() == 2);
}

TEST_CASE("parallel_for visits every index once") {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; });
  for (const auto& h : hits) CHECK(h.load() == 1);
  CHECK(worker_count() >= 1);
}

TEST_CASE("VARISTAB_THREADS caps the worker count") {
  setenv("VARISTAB_THREADS", "1", 1);
  CHECK(worker_count() == 1);
  unsetenv("VARISTAB_THREADS");
}
