// Copyright 2026 the qelab authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <string>
#include <vector>

#include "qelab/assembly.hpp"
#include "qelab/fields.hpp"

namespace qelab {

struct SolveConfig {
  // Inner Newton solve of the frozen monotone problem.
  double newton_tol = 1e-10;   // l2 norm of the interior residual vector
  int max_newton = 60;
  double backtrack_factor = 0.5;
  int max_backtrack = 40;
  double armijo = 1e-4;
  double max_step_scale = 1e3;  // Newton step capped at this multiple of (1 + |u|_inf)

  // Fixed-point iteration on the resolvent.
  double picard_tol = 1e-9;    // W^{1,p} gap ||u - F(u)||
  int max_picard = 200;
  double relaxation = 1.0;     // omega in (0, 1]
  bool anderson = false;       // optional secant acceleration, off by default
  int anderson_depth = 3;
  double divergence_factor = 1e3;

  // Homotopy fallback u = t F(u); the grid must end at t = 1.
  std::vector<double> continuation_steps = {0.25, 0.5, 0.75, 1.0};

  // Outer truncation levels (strictly increasing).
  std::vector<double> truncation_schedule = default_truncation_schedule();

  // Boundedness monitor.
  int sigma_levels = 8;        // log-spaced over [1e-3, 1] * max |u|
  double monitor_cap = 1e6;

  // Constant of the embedding gate; estimated from the mesh when absent.
  std::optional<SobolevConstant> sobolev;

  static std::vector<double> default_truncation_schedule();
  void validate() const;
};

struct NewtonStats {
  int iterations = 0;
  double final_residual = 0.0;
  bool used_gradient_step = false;
  bool singular_linearization = false;
  bool used_load_ramp = false;
};

struct MonitorEntry {
  double sigma;
  double lhs;       // ||grad u||_p^p over {|u| < sigma}
  double rhs_part;  // ||u||_p^p over {|u| < sigma}
  double c_est;     // lhs / (1 + rhs_part)
  bool flagged;     // c_est above the configured cap
};

struct StageRecord {
  double t = 1.0;  // homotopy parameter (plain fixed point runs at t = 1)
  std::vector<double> picard_increments;  // W^{1,p} fixed-point gaps per sweep
  std::vector<double> iterate_norms;      // ||u_k||_{W^{1,p}}
  int newton_iterations = 0;
  double final_residual = 0.0;
  bool converged = false;
};

struct LevelRecord {
  double level = 0.0;  // truncation level n (0 for single-field solves)
  std::vector<StageRecord> stages;
  double norm_w1p = 0.0;
  double diff_from_previous = -1.0;   // ||u_n - u_{n-1}||_{W^{1,p}}, -1 on the first level
  double full_residual_norm = -1.0;   // untruncated-field residual at this level's iterate
  double gamma_diagnostic = -1.0;     // arctan-pairing between consecutive levels
  std::vector<MonitorEntry> monitor;
};

struct SolveReport {
  std::vector<LevelRecord> levels;
  bool converged = false;
  bool stagnated = false;
  bool blowup_suspected = false;
  double uniform_bound = 0.0;   // max_n ||u_n||_{W^{1,p}}
  double uniform_bound_growth = 0.0;  // relative growth over the last two levels
  std::optional<SobolevConstant> sobolev_used;
  int distance_gate_level = 0;  // m certified by the distance condition
  double distance_measured = 0.0;
  double distance_threshold = 0.0;

  nlohmann::json to_json() const;
  std::string to_json_text() const;
  /// Per-iteration history as CSV rows (level, stage t, sweep, increment, norm).
  void write_history_csv(std::ostream& out) const;
};

struct PicardDiverged : Error {
  SolveReport report;
  PicardDiverged(const std::string& msg, SolveReport rep) : Error(msg), report(std::move(rep)) {}
};
struct Stagnated : Error {
  SolveReport report;
  Stagnated(const std::string& msg, SolveReport rep) : Error(msg), report(std::move(rep)) {}
};
struct SchemeNotCauchy : Error {
  SolveReport report;
  SchemeNotCauchy(const std::string& msg, SolveReport rep) : Error(msg), report(std::move(rep)) {}
};

struct FrozenResult {
  DiscreteFunction u;
  NewtonStats stats;
};

/// Solves the frozen-coefficient monotone problem -div A(x, v(x), grad u) = Phi
/// by damped Newton with backtracking; the solution is unique by discrete
/// monotonicity. A singular linearization falls back to a preconditioned
/// gradient step (flagged, not fatal); a stall retries once through a load
/// ramp before throwing NewtonStalled.
FrozenResult frozen_solve(const QuasilinearField& field, const DiscreteFunction& v,
                          const RhsFunctional& rhs, const SolveConfig& config,
                          const std::optional<DiscreteFunction>& initial = std::nullopt);

struct FixedPointResult {
  DiscreteFunction u;
  SolveReport report;
};

/// Fixed point of the resolvent v -> F(v) (the frozen solve), by relaxed
/// Picard iteration; on stagnation the solve falls back to the homotopy
/// u = t F(u) along the continuation grid, warm-starting each step. Throws
/// PicardDiverged when the iterate norms blow past divergence_factor and
/// Stagnated when the homotopy cannot reach t = 1.
FixedPointResult resolvent_fixed_point(const QuasilinearField& field, const RhsFunctional& rhs,
                                       const SolveConfig& config,
                                       const std::optional<DiscreteFunction>& initial = std::nullopt);

/// Outer loop of the truncated-coefficient scheme: solves the fixed-point
/// problem for A_n along the truncation schedule, warm-starting, until the
/// truncation is exact on the sample set or consecutive iterates are Cauchy
/// and the untruncated residual is at tolerance. Entry is gated by
/// choose_truncation_level (DistanceTooLarge propagates); exhausting the
/// schedule throws SchemeNotCauchy with the partial report attached.
FixedPointResult truncation_continuation(const QuasilinearField& field, const RhsFunctional& rhs,
                                         const SolveConfig& config);

/// Boundedness monitor: for each sigma, compares ||grad u||_p^p against
/// 1 + ||u||_p^p on the sublevel set {|u| < sigma}. A uniformly bounded
/// C_est across refinements/levels is the discrete signature of the weak
/// compactness bound; entries above `cap` are flagged.
std::vector<MonitorEntry> apriori_monitor(const DiscreteFunction& u,
                                          const StructuralEnvelope& envelope,
                                          const std::vector<double>& sigma_grid,
                                          double cap = 1e6);
/// Default grid: `levels` log-spaced values spanning [1e-3, 1] * max|u|.
std::vector<double> default_sigma_grid(const DiscreteFunction& u, int levels);

}  // namespace qelab
