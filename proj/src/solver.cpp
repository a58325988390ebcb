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
#include "qelab/solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>
#include <ostream>

#include "qelab/csv.hpp"

namespace qelab {

std::vector<double> SolveConfig::default_truncation_schedule() {
  std::vector<double> s;
  for (double n = 1.0; n <= 1048576.0; n *= 2.0) s.push_back(n);
  return s;
}

void SolveConfig::validate() const {
  if (!(newton_tol > 0.0 && picard_tol > 0.0)) throw ConfigError("SolveConfig: tolerances must be positive");
  if (!(relaxation > 0.0 && relaxation <= 1.0)) throw ConfigError("SolveConfig: relaxation in (0,1]");
  if (continuation_steps.empty() || continuation_steps.back() != 1.0)
    throw ConfigError("SolveConfig: continuation grid must end at t = 1");
  for (std::size_t i = 1; i < continuation_steps.size(); ++i)
    if (!(continuation_steps[i] > continuation_steps[i - 1]))
      throw ConfigError("SolveConfig: continuation grid must increase");
  for (std::size_t i = 1; i < truncation_schedule.size(); ++i)
    if (!(truncation_schedule[i] > truncation_schedule[i - 1]))
      throw ConfigError("SolveConfig: truncation schedule must be strictly increasing");
}

namespace {

double linf(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

Eigen::VectorXd solve_linear(const Eigen::SparseMatrix<double>& J, const Eigen::VectorXd& rhs,
                             bool* singular) {
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(J);
  if (lu.info() == Eigen::Success) {
    Eigen::VectorXd d = lu.solve(rhs);
    if (d.allFinite()) {
      *singular = false;
      return d;
    }
  }
  // Preconditioned gradient direction: the solver survives a singular
  // linearization by falling back to a diagonal-scaled residual step.
  *singular = true;
  Eigen::VectorXd diag = J.diagonal();
  Eigen::VectorXd d = rhs;
  for (int i = 0; i < d.size(); ++i) d[i] /= (std::abs(diag[i]) > 1e-300 ? diag[i] : 1.0);
  return d;
}

FrozenResult newton_solve(const QuasilinearField& field, const DiscreteFunction& v,
                          const RhsFunctional& rhs, const SolveConfig& config,
                          DiscreteFunction u, bool allow_ramp);

// One backtracked Newton path at a fixed load. Returns nullopt on stall.
std::optional<FrozenResult> newton_path(const QuasilinearField& field, const DiscreteFunction& v,
                                        const RhsFunctional& rhs, const SolveConfig& config,
                                        DiscreteFunction u) {
  NewtonStats stats;
  // The attainable residual floor scales with the data entering the frozen
  // problem (load and frozen-coefficient terms), measured at the zero state;
  // an absolute tolerance below that floor would stall on large data.
  const double data_scale =
      assemble_residual(field, v, DiscreteFunction::zeros(u.mesh()), rhs).norm();
  const double tol = config.newton_tol * std::max(1.0, data_scale);
  Eigen::VectorXd R = assemble_residual(field, v, u, rhs);
  double rn = R.norm();
  // Polish steps after reaching tolerance push the residual to its floor, so
  // quantities contracted at a multiple of newton_tol (two-start uniqueness,
  // weak-form probes) hold with margin.
  int polish_left = 2;
  for (int it = 0; it < config.max_newton; ++it) {
    if (rn <= tol) {
      if (polish_left == 0 || rn == 0.0) {
        stats.iterations = it;
        stats.final_residual = rn;
        return FrozenResult{std::move(u), stats};
      }
      --polish_left;
    }
    const Eigen::SparseMatrix<double> J = assemble_jacobian(field, v, u, rhs);
    bool singular = false;
    Eigen::VectorXd d = solve_linear(J, -R, &singular);
    if (singular) {
      stats.singular_linearization = true;
      stats.used_gradient_step = true;
    }
    const double cap = config.max_step_scale * (1.0 + linf(u.coeffs()));
    const double dn = d.lpNorm<Eigen::Infinity>();
    if (dn > cap) d *= cap / dn;

    double s = 1.0;
    bool accepted = false;
    for (int bt = 0; bt <= config.max_backtrack; ++bt) {
      DiscreteFunction trial = u;
      for (int i = 0; i < d.size(); ++i) trial.coeffs_mut()[static_cast<std::size_t>(i)] += s * d[i];
      trial.enforce_boundary();
      const Eigen::VectorXd Rt = assemble_residual(field, v, trial, rhs);
      const double rt = Rt.norm();
      if (std::isfinite(rt) && rt <= (1.0 - config.armijo * s) * rn) {
        u = std::move(trial);
        R = Rt;
        rn = rt;
        accepted = true;
        break;
      }
      s *= config.backtrack_factor;
    }
    if (!accepted) {
      // A stall at tolerance means the polish hit its floor, not a failure.
      if (rn <= tol) {
        stats.iterations = it;
        stats.final_residual = rn;
        return FrozenResult{std::move(u), stats};
      }
      return std::nullopt;
    }
  }
  if (rn <= tol) {
    stats.iterations = config.max_newton;
    stats.final_residual = rn;
    return FrozenResult{std::move(u), stats};
  }
  return std::nullopt;
}

FrozenResult newton_solve(const QuasilinearField& field, const DiscreteFunction& v,
                          const RhsFunctional& rhs, const SolveConfig& config, DiscreteFunction u,
                          bool allow_ramp) {
  if (auto res = newton_path(field, v, rhs, config, u)) return std::move(*res);
  if (allow_ramp) {
    // Load ramp: walk the datum up the continuation grid, warm-starting.
    DiscreteFunction w = DiscreteFunction::zeros(u.mesh());
    for (double t : config.continuation_steps) {
      RhsFunctional scaled = RhsFunctional::from_load(u.mesh(), [&] {
        std::vector<double> l = rhs.node_actions();
        for (double& x : l) x *= t;
        return l;
      }());
      auto res = newton_path(field, v, scaled, config, w);
      if (!res) throw NewtonStalled("frozen_solve: Newton stalled (load ramp at t = " +
                                    std::to_string(t) + ")");
      w = std::move(res->u);
      if (t == 1.0) {
        res->stats.used_load_ramp = true;
        return FrozenResult{std::move(w), res->stats};
      }
    }
  }
  throw NewtonStalled("frozen_solve: Newton stalled after backtracking was exhausted");
}

}  // namespace

FrozenResult frozen_solve(const QuasilinearField& field, const DiscreteFunction& v,
                          const RhsFunctional& rhs, const SolveConfig& config,
                          const std::optional<DiscreteFunction>& initial) {
  config.validate();
  if (v.mesh() != rhs.mesh()) throw MeshMismatch("frozen_solve: mesh mismatch");
  DiscreteFunction u0 = initial ? *initial : DiscreteFunction::zeros(v.mesh());
  if (u0.mesh() != v.mesh()) throw MeshMismatch("frozen_solve: initial guess mesh mismatch");
  return newton_solve(field, v, rhs, config, std::move(u0), /*allow_ramp=*/true);
}

namespace {

// Anderson secant update over the last `depth` fixed-point residuals.
class AndersonMixer {
 public:
  AndersonMixer(int depth, int n) : depth_(depth), n_(n) {}

  Eigen::VectorXd next(const Eigen::VectorXd& u, const Eigen::VectorXd& Fu) {
    const Eigen::VectorXd g = Fu - u;
    us_.push_back(u);
    gs_.push_back(g);
    if (static_cast<int>(us_.size()) > depth_ + 1) {
      us_.erase(us_.begin());
      gs_.erase(gs_.begin());
    }
    const int m = static_cast<int>(us_.size()) - 1;
    if (m < 1) return Fu;
    Eigen::MatrixXd dG(n_, m), dU(n_, m);
    for (int j = 0; j < m; ++j) {
      dG.col(j) = gs_[static_cast<std::size_t>(j) + 1] - gs_[static_cast<std::size_t>(j)];
      dU.col(j) = us_[static_cast<std::size_t>(j) + 1] - us_[static_cast<std::size_t>(j)];
    }
    const Eigen::VectorXd gamma = dG.colPivHouseholderQr().solve(g);
    if (!gamma.allFinite()) return Fu;
    return u + g - (dU + dG) * gamma;
  }

 private:
  int depth_;
  int n_;
  std::vector<Eigen::VectorXd> us_, gs_;
};

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

DiscreteFunction from_eigen(const std::shared_ptr<const Mesh>& mesh, const Eigen::VectorXd& v) {
  std::vector<double> c(v.data(), v.data() + v.size());
  DiscreteFunction f(mesh, std::move(c));
  f.enforce_boundary();
  return f;
}

// Damped fixed-point sweep for u = t F(u) at one homotopy parameter.
// Updates `u` in place; records increments and norms into `stage`.
bool fixed_point_stage(const QuasilinearField& field, const RhsFunctional& rhs,
                       const SolveConfig& config, double t, double gap_tol, DiscreteFunction& u,
                       StageRecord& stage, SolveReport& report) {
  const double p = field.envelope.p;
  stage.t = t;
  std::optional<AndersonMixer> mixer;
  if (config.anderson) mixer.emplace(config.anderson_depth, u.mesh()->n_nodes());

  double smallest_norm = std::numeric_limits<double>::infinity();
  double first_norm = -1.0;
  for (int k = 0; k < config.max_picard; ++k) {
    std::optional<FrozenResult> solved;
    try {
      solved.emplace(frozen_solve(field, u, rhs, config, u));
    } catch (const NewtonStalled&) {
      // A stall after the iterates have already grown is blow-up evidence.
      const double un_now = norm_w1p(u, p);
      if (first_norm >= 0.0 && un_now > 10.0 * std::max(first_norm, 1e-12)) {
        report.blowup_suspected = true;
        stage.converged = false;
        return false;
      }
      throw;
    }
    FrozenResult& fr = *solved;
    stage.newton_iterations += fr.stats.iterations;
    stage.final_residual = fr.stats.final_residual;
    DiscreteFunction target = fr.u;  // F(u)
    if (t != 1.0) {
      for (double& c : target.coeffs_mut()) c *= t;
    }
    const double gap = w1p_distance(target, u, p);
    stage.picard_increments.push_back(gap);
    const double un = norm_w1p(u, p);
    stage.iterate_norms.push_back(un);
    if (first_norm < 0.0) first_norm = un;
    smallest_norm = std::min(smallest_norm, std::max(un, 1e-30));

    if (!std::isfinite(gap) || !std::isfinite(un) ||
        un > config.divergence_factor * std::max(smallest_norm, 1.0)) {
      report.blowup_suspected = true;
      stage.converged = false;
      return false;
    }
    if (gap <= gap_tol) {
      stage.converged = true;
      return true;
    }

    Eigen::VectorXd next;
    if (mixer) {
      next = mixer->next(to_eigen(u.coeffs()), to_eigen(target.coeffs()));
    } else {
      next = (1.0 - config.relaxation) * to_eigen(u.coeffs()) +
             config.relaxation * to_eigen(target.coeffs());
    }
    u = from_eigen(u.mesh(), next);
  }
  stage.converged = false;
  return false;
}

}  // namespace

FixedPointResult resolvent_fixed_point(const QuasilinearField& field, const RhsFunctional& rhs,
                                       const SolveConfig& config,
                                       const std::optional<DiscreteFunction>& initial) {
  config.validate();
  DiscreteFunction u = initial ? *initial : DiscreteFunction::zeros(rhs.mesh());
  SolveReport report;
  LevelRecord level;
  level.level = 0.0;

  StageRecord plain;
  const bool ok = fixed_point_stage(field, rhs, config, 1.0, config.picard_tol, u, plain, report);
  level.stages.push_back(plain);
  if (report.blowup_suspected) {
    level.norm_w1p = plain.iterate_norms.empty() ? 0.0 : plain.iterate_norms.back();
    report.levels.push_back(std::move(level));
    throw PicardDiverged("resolvent_fixed_point: iterate norms blew up (factor > 1e3)", report);
  }
  if (!ok) {
    // Homotopy fallback: walk u = t F(u) up the grid, warm-starting.
    u = DiscreteFunction::zeros(rhs.mesh());
    for (double t : config.continuation_steps) {
      StageRecord stage;
      const double tol = (t == 1.0) ? config.picard_tol : 10.0 * config.picard_tol;
      const bool stage_ok = fixed_point_stage(field, rhs, config, t, tol, u, stage, report);
      level.stages.push_back(stage);
      if (report.blowup_suspected) {
        report.levels.push_back(std::move(level));
        throw PicardDiverged("resolvent_fixed_point: homotopy iterates blew up", report);
      }
      if (!stage_ok && t == 1.0) {
        report.stagnated = true;
        report.levels.push_back(std::move(level));
        throw Stagnated("resolvent_fixed_point: homotopy reached t = 1 without convergence",
                        report);
      }
    }
  }

  level.norm_w1p = norm_w1p(u, field.envelope.p);
  level.full_residual_norm = assemble_full_residual(field, u, rhs).norm();
  level.monitor = apriori_monitor(u, field.envelope,
                                  default_sigma_grid(u, config.sigma_levels), config.monitor_cap);
  report.uniform_bound = level.norm_w1p;
  report.converged = true;
  report.levels.push_back(std::move(level));
  return FixedPointResult{std::move(u), std::move(report)};
}

namespace {

// Pairing of the field monotonicity against the arctan of the level
// difference; nonnegative by strict monotonicity, decreasing along a
// converging schedule.
double gamma_diagnostic(const QuasilinearField& field_n, const DiscreteFunction& u_n,
                        const DiscreteFunction& u_prev) {
  const Mesh& mesh = *u_n.mesh();
  double acc = 0.0;
  for (int q = 0; q < mesh.n_quad(); ++q) {
    const VecN x = mesh.quad_position(q);
    const double un = u_n.value_at_quad(q);
    VecN gn = u_n.gradient_at_quad(q);
    VecN gp = u_prev.gradient_at_quad(q);
    if (mesh.kind() == Mesh::Kind::radial) {
      gn = VecN::axis(mesh.ambient_dim(), 0, gn[0]);
      gp = VecN::axis(mesh.ambient_dim(), 0, gp[0]);
    }
    const VecN dA = field_n.eval(x, un, gn) - field_n.eval(x, un, gp);
    const double w = un - u_prev.value_at_quad(q);
    const VecN dgrad = gn - gp;
    acc += mesh.quad_weight(q) * dA.dot(dgrad) / (1.0 + w * w);
  }
  return acc;
}

}  // namespace

FixedPointResult truncation_continuation(const QuasilinearField& field, const RhsFunctional& rhs,
                                         const SolveConfig& config) {
  config.validate();
  const auto mesh = rhs.mesh();
  const StructuralEnvelope& env = field.envelope;

  SobolevConstant S = config.sobolev
                          ? *config.sobolev
                          : sobolev_constant(env.N, env.p, mesh);
  const TruncationLevelChoice gate =
      choose_truncation_level(env.sample_b_for_measure(*mesh), env.alpha, env.p, S);

  SolveReport report;
  report.sobolev_used = S;
  report.distance_gate_level = gate.level;
  report.distance_measured = gate.distance;
  report.distance_threshold = gate.threshold;

  const double b_max = env.sample_b(*mesh).max_abs_value();  // theta == 1 iff n >= this
  auto shared = std::make_shared<const QuasilinearField>(field);
  DiscreteFunction u = DiscreteFunction::zeros(mesh);
  std::optional<DiscreteFunction> prev;

  for (double n : config.truncation_schedule) {
    const QuasilinearField field_n = truncate_field(shared, n);
    std::optional<FixedPointResult> inner;
    try {
      inner.emplace(resolvent_fixed_point(field_n, rhs, config, u));
    } catch (PicardDiverged& e) {
      for (auto& lv : e.report.levels) lv.level = n;
      report.levels.insert(report.levels.end(), e.report.levels.begin(), e.report.levels.end());
      report.blowup_suspected = true;
      throw PicardDiverged(e.what(), report);
    } catch (Stagnated& e) {
      for (auto& lv : e.report.levels) lv.level = n;
      report.levels.insert(report.levels.end(), e.report.levels.begin(), e.report.levels.end());
      report.stagnated = true;
      throw Stagnated(e.what(), report);
    }
    u = std::move(inner->u);

    LevelRecord level = std::move(inner->report.levels.front());
    level.level = n;
    level.norm_w1p = norm_w1p(u, env.p);
    level.full_residual_norm = assemble_full_residual(field, u, rhs).norm();
    if (prev) {
      level.diff_from_previous = w1p_distance(u, *prev, env.p);
      level.gamma_diagnostic = gamma_diagnostic(field_n, u, *prev);
    }
    report.uniform_bound = std::max(report.uniform_bound, level.norm_w1p);
    if (report.levels.size() >= 1) {
      const double prev_norm = report.levels.back().norm_w1p;
      if (prev_norm > 0.0)
        report.uniform_bound_growth = std::abs(level.norm_w1p - prev_norm) / prev_norm;
    }
    const bool truncation_exact = n >= b_max;  // theta == 1 at every sample
    const bool cauchy = prev && level.diff_from_previous < config.picard_tol;
    const bool residual_ok = level.full_residual_norm <= 10.0 * config.newton_tol;
    report.levels.push_back(std::move(level));
    prev = u;

    if ((truncation_exact || cauchy) && residual_ok) {
      report.converged = true;
      return FixedPointResult{std::move(u), std::move(report)};
    }
  }
  throw SchemeNotCauchy(
      "truncation_continuation: schedule exhausted before the level iterates stabilized", report);
}

std::vector<double> default_sigma_grid(const DiscreteFunction& u, int levels) {
  double umax = linf(u.coeffs());
  if (umax <= 0.0) umax = 1.0;
  std::vector<double> grid;
  for (int i = 0; i < levels; ++i) {
    const double f = (levels == 1) ? 1.0
                                   : std::pow(10.0, -3.0 + 3.0 * static_cast<double>(i) /
                                                                (static_cast<double>(levels) - 1.0));
    grid.push_back(f * umax);
  }
  return grid;
}

std::vector<MonitorEntry> apriori_monitor(const DiscreteFunction& u,
                                          const StructuralEnvelope& envelope,
                                          const std::vector<double>& sigma_grid, double cap) {
  const Mesh& mesh = *u.mesh();
  const double p = envelope.p;
  std::vector<MonitorEntry> out;
  for (double sigma : sigma_grid) {
    if (!(sigma > 0.0)) throw Error("apriori_monitor: sigma values must be positive");
    double lhs = 0.0, rhs = 0.0;
    for (int q = 0; q < mesh.n_quad(); ++q) {
      const double uv = u.value_at_quad(q);
      if (std::abs(uv) >= sigma) continue;  // complement of {|u| >= sigma}
      const double w = mesh.quad_weight(q);
      lhs += w * std::pow(u.gradient_at_quad(q).norm(), p);
      rhs += w * std::pow(std::abs(uv), p);
    }
    const double c = lhs / (1.0 + rhs);
    out.push_back(MonitorEntry{sigma, lhs, rhs, c, c > cap});
  }
  return out;
}

// --- report serialization ---------------------------------------------------

nlohmann::json SolveReport::to_json() const {
  nlohmann::json j;
  j["converged"] = converged;
  j["stagnated"] = stagnated;
  j["blowup_suspected"] = blowup_suspected;
  j["uniform_bound"] = uniform_bound;
  j["uniform_bound_growth"] = uniform_bound_growth;
  if (sobolev_used) {
    j["sobolev"] = {{"N", sobolev_used->N},
                    {"p", sobolev_used->p},
                    {"value", sobolev_used->value},
                    {"q_used", sobolev_used->q_used},
                    {"provenance", sobolev_used->provenance == SobolevProvenance::user_override
                                       ? "user_override"
                                       : "discrete_estimate"}};
    j["distance_gate"] = {{"level", distance_gate_level},
                          {"distance", distance_measured},
                          {"threshold", distance_threshold}};
  }
  j["levels"] = nlohmann::json::array();
  for (const LevelRecord& lv : levels) {
    nlohmann::json jl;
    jl["level"] = lv.level;
    jl["norm_w1p"] = lv.norm_w1p;
    jl["diff_from_previous"] = lv.diff_from_previous;
    jl["full_residual_norm"] = lv.full_residual_norm;
    jl["gamma_diagnostic"] = lv.gamma_diagnostic;
    jl["stages"] = nlohmann::json::array();
    for (const StageRecord& st : lv.stages) {
      jl["stages"].push_back({{"t", st.t},
                              {"picard_increments", st.picard_increments},
                              {"iterate_norms", st.iterate_norms},
                              {"newton_iterations", st.newton_iterations},
                              {"final_residual", st.final_residual},
                              {"converged", st.converged}});
    }
    jl["monitor"] = nlohmann::json::array();
    for (const MonitorEntry& m : lv.monitor)
      jl["monitor"].push_back({{"sigma", m.sigma},
                               {"lhs", m.lhs},
                               {"rhs_part", m.rhs_part},
                               {"c_est", m.c_est},
                               {"flagged", m.flagged}});
    j["levels"].push_back(std::move(jl));
  }
  return j;
}

std::string SolveReport::to_json_text() const { return to_json().dump(2); }

void SolveReport::write_history_csv(std::ostream& out) const {
  CsvWriter w(out);
  w.row(std::vector<std::string>{"level", "t", "sweep", "increment", "iterate_norm"});
  for (const LevelRecord& lv : levels)
    for (const StageRecord& st : lv.stages)
      for (std::size_t k = 0; k < st.picard_increments.size(); ++k)
        w.row(std::vector<double>{lv.level, st.t, static_cast<double>(k), st.picard_increments[k],
                                  k < st.iterate_norms.size() ? st.iterate_norms[k] : 0.0});
}

}  // namespace qelab
