#pragma once

// Checkers for the sufficient conditions of Lipschitz lower semicontinuity and
// calmness of G, and the Ekeland descent tracker.

#include <optional>
#include <string>
#include <vector>

#include "varistab/dual.hpp"
#include "varistab/geneq.hpp"
#include "varistab/oracle.hpp"
#include "varistab/slopes.hpp"

namespace varistab {

enum class Status { Holds, Fails, SampledEvidence };
const char* to_string(Status s);

/// Overall outcome of a check; maps onto the CLI exit codes.
enum class Outcome { Holds, Fails, Undetermined };
const char* to_string(Outcome o);

struct HypothesisStatus {
  std::string id;  // "i" .. "vi"
  Status status;
  std::string detail;
  Vector witness;
  double value = 0.0;
};

struct CheckConfig {
  RadiusSchedule schedule;
  /// Parameter scales for constants and the oracle.
  double p_r0 = 0.5;
  double p_ratio = 0.25;
  int p_scales = 8;
  std::size_t p_extra_dirs = 0;
  /// x-grid of the oracle and of the validation sweeps.
  double x_step = 0x1.0p-12;
  /// Acceptance threshold of solve_on_grid in the oracle; 0 means x_step.
  double solve_tol = 0.0;
  /// A limit counts as positive when the finest-level value is at least this.
  double positivity = 1e-2;
  double slack = 0.05;
  /// Ball radius of the tracker and of the localized samplers; 0 means half
  /// the radius of the x search region.
  double delta_star = 0.0;
  double calm_delta = 0.5;
  std::vector<double> validation_offsets = {0.1, 0.2, 0.3, 0.4, 0.5};
  bool validate = true;
  std::uint64_t seed = 0;

  double resolved_delta_star(const GenEqProblem& prob) const;
  double resolved_solve_tol() const { return solve_tol > 0.0 ? solve_tol : x_step; }
  OracleGrid oracle_grid(const GenEqProblem& prob) const;
};

enum class ConstantsMode { Pointwise, Uniform };

struct PerturbationConstants {
  ConstantsMode mode;
  double l_f = 0.0, l_F = 0.0;
  bool f_diverging = false, F_diverging = false;
  std::vector<double> scale_radius, f_trace, F_trace;
  Vector f_witness, F_witness;  // (p) or (p, x)
};

PerturbationConstants estimate_perturbation_constants(const GenEqProblem& prob, ConstantsMode mode,
                                                      const CheckConfig& config);

struct ValidationPoint {
  Vector p;
  double distance;  // min d(x, x_ref) over solve_on_grid(prob, p)
  double allowed;   // bound * d(p, p_ref) * (1 + slack) + grid spacing
  bool pass;
};

struct LiplscReport {
  std::vector<HypothesisStatus> statuses;
  PerturbationConstants constants;
  SlopeEstimate slope;
  std::optional<double> bound;
  double zeta = 0.0;  // informational radius from the proof
  std::vector<ValidationPoint> validation;
  bool validation_pass = true;
  std::optional<EmpiricalEstimate> oracle;
  std::optional<Verdict> verdict;
  Outcome outcome = Outcome::Undetermined;
};

LiplscReport check_liplsc(const GenEqProblem& prob, const CheckConfig& config);

struct CalmReport {
  std::vector<HypothesisStatus> statuses;
  PerturbationConstants constants;
  SlopeEstimate slope;
  std::optional<double> bound;
  std::optional<EmpiricalEstimate> oracle;
  std::optional<Verdict> verdict;
  Outcome outcome = Outcome::Undetermined;
};

/// disp(x, y) as a scalar map on X x Y, sampled on the graph of F(p_ref, .).
ScalarMap graph_displacement_map(const GenEqProblem& prob);

CalmReport check_calm(const GenEqProblem& prob, const CheckConfig& config);

struct CoderivativeCalmReport {
  std::vector<HypothesisStatus> statuses;
  double upper_lipschitz = 0.0;
  CConstant c;
  std::optional<EmpiricalEstimate> oracle;
  bool calm = false;
  Outcome outcome = Outcome::Undetermined;
};

CoderivativeCalmReport check_calm_coderivative(const GenEqProblem& prob, const CheckConfig& config);

struct SmoothBaseLevel {
  double eps;
  std::size_t points;
  double min_singular;  // inf over sampled points of inf |J* y*|
  double max_outer;     // sup over sampled points of the outer norm
  bool pass;            // strict inequality at every sampled point
  Vector witness;       // (x, y) of the worst margin
};

struct SmoothBaseReport {
  double gamma;
  std::vector<SmoothBaseLevel> levels;
  bool holds = false;
  Outcome outcome = Outcome::Undetermined;
};

SmoothBaseReport check_calm_smooth_base(const GenEqProblem& prob, double gamma, const CheckConfig& config);

struct TrackerConfig {
  double c = 0.5;
  double step0 = 0.25;
  double step_floor = 1e-12;
  int max_iterations = 100000;
  double tol_solution = 1e-8;
  double delta_star = 0.0;  // 0 means half the radius of the x search region
  std::size_t extra_dirs = 32;
  std::uint64_t seed = 0;
  /// l_f + l_F for the distance certificate (optional).
  std::optional<double> lf_plus_lF;
};

struct TraceStep {
  int iteration;
  double psi;
  double distance;  // d(x, x_ref)
  double step;
};

struct TrackerResult {
  Vector x;
  double psi;
  double distance;
  int iterations;
  std::optional<double> distance_bound;
  bool distance_ok = true;
  std::vector<TraceStep> trace;
};

/// Ekeland-type descent on psi(p, .) from x_ref inside B(x_ref, delta*).
/// Throws NoSolutionFound (message carries the last trace entries) when the
/// step floor is reached with psi above tol_solution.
TrackerResult ekeland_track(const GenEqProblem& prob, const Vector& p, const TrackerConfig& config);

/// Radius of the parameter ball the tracker is run on by default: the proof
/// radius zeta of check_liplsc, capped at 0.4 (0.4 when the check fails).
double default_track_radius(const GenEqProblem& prob, const CheckConfig& config);

/// Eight parameters p_ref +- {1/4, 1/2, 3/4, 1} * radius along the first axis.
std::vector<Vector> default_track_params(const GenEqProblem& prob, double radius);

}  // namespace varistab
