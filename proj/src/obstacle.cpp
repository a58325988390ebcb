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
#include "qelab/obstacle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace qelab {

Obstacle::Obstacle(std::shared_ptr<const Mesh> mesh, std::vector<double> psi)
    : mesh_(std::move(mesh)), psi_(std::move(psi)) {
  if (!mesh_) throw Error("Obstacle: null mesh");
  if (static_cast<int>(psi_.size()) != mesh_->n_nodes())
    throw MeshMismatch("Obstacle: psi length != node count");
  all_unconstrained_ = true;
  for (double v : psi_) {
    if (v == unconstrained_marker()) continue;
    all_unconstrained_ = false;
    if (!(v <= 0.0)) throw NotAdmissible("Obstacle: psi must be <= 0 at every node (shifted form)");
  }
}

Obstacle Obstacle::unconstrained(std::shared_ptr<const Mesh> mesh) {
  std::vector<double> psi(static_cast<std::size_t>(mesh->n_nodes()), unconstrained_marker());
  return Obstacle(std::move(mesh), std::move(psi));
}

Obstacle Obstacle::constant(std::shared_ptr<const Mesh> mesh, double level) {
  std::vector<double> psi(static_cast<std::size_t>(mesh->n_nodes()), level);
  return Obstacle(std::move(mesh), std::move(psi));
}

bool Obstacle::admissible(const DiscreteFunction& u) const {
  if (u.mesh() != mesh_) throw MeshMismatch("Obstacle::admissible: mesh mismatch");
  for (std::size_t i = 0; i < psi_.size(); ++i)
    if (psi_[i] != unconstrained_marker() && u.coeffs()[i] < psi_[i]) return false;
  return true;
}

void Obstacle::project(DiscreteFunction& u) const {
  if (u.mesh() != mesh_) throw MeshMismatch("Obstacle::project: mesh mismatch");
  for (std::size_t i = 0; i < psi_.size(); ++i)
    if (psi_[i] != unconstrained_marker() && u.coeffs_mut()[i] < psi_[i])
      u.coeffs_mut()[i] = psi_[i];
  u.enforce_boundary();
}

std::pair<QuasilinearField, Obstacle> shift_obstacle(const QuasilinearField& field,
                                                     const std::vector<double>& psi_raw,
                                                     const DiscreteFunction& g) {
  const auto mesh = g.mesh();
  if (static_cast<int>(psi_raw.size()) != mesh->n_nodes())
    throw MeshMismatch("shift_obstacle: psi length != node count");
  for (int i : mesh->boundary_nodes())
    if (g.coeffs()[static_cast<std::size_t>(i)] != 0.0)
      throw NotAdmissible("shift_obstacle: g violates the zero boundary (not in W^{1,p}_0)");
  for (std::size_t i = 0; i < psi_raw.size(); ++i)
    if (psi_raw[i] != Obstacle::unconstrained_marker() && g.coeffs()[i] < psi_raw[i])
      throw NotAdmissible("shift_obstacle: g < psi at node " + std::to_string(i));
  if (mesh->kind() != Mesh::Kind::radial)
    throw Error("shift_obstacle: shifted evaluators are implemented for radial meshes");

  QuasilinearField shifted;
  shifted.kind = FieldKind::custom;
  auto base = std::make_shared<const QuasilinearField>(field);
  auto gfun = std::make_shared<const DiscreteFunction>(g);
  const int N = mesh->ambient_dim();
  auto shift_args = [gfun, N](const VecN& x, double u, const VecN& xi) {
    const double r = x.norm();
    const double gv = gfun->value_at_radius(r);
    const double gd = gfun->derivative_at_radius(r);
    VecN xs = xi;
    if (r > 0.0)
      for (int k = 0; k < N; ++k) xs[k] += gd * x[k] / r;
    else
      xs[0] += gd;
    return std::make_pair(u + gv, xs);
  };
  shifted.eval = [base, shift_args](const VecN& x, double u, const VecN& xi) {
    auto [us, xs] = shift_args(x, u, xi);
    return base->eval(x, us, xs);
  };
  if (field.d_xi) {
    shifted.d_xi = [base, shift_args](const VecN& x, double u, const VecN& xi) {
      auto [us, xs] = shift_args(x, u, xi);
      return base->d_xi(x, us, xs);
    };
  }

  // Conservative envelope for the shifted field: Young absorptions of the
  // |grad g| cross terms move them into phi; every constant is explicit.
  const StructuralEnvelope& env = field.envelope;
  const double p = env.p;
  const double cp = std::max(1.0, std::pow(2.0, p - 2.0));
  const double lam = p * env.alpha / (4.0 * (p - 1.0) * env.beta);
  const double drift_cost = env.beta * std::pow(lam, 1.0 - p) / p + 0.75 * env.alpha + 2.0;
  StructuralEnvelope senv;
  senv.alpha = 0.75 * env.alpha * std::pow(2.0, 1.0 - p);
  senv.beta = std::max(cp * env.beta, senv.alpha * (1.0 + 1e-12));
  senv.p = p;
  senv.N = env.N;
  const ScalarProfile base_b = env.b;
  senv.b = ScalarProfile::custom([base_b](const VecN& x) { return 2.0 * base_b(x); });
  senv.b.name = "shifted(" + base_b.name + ")";
  const ScalarProfile base_phi = env.phi;
  const double beta_c = cp * env.beta;
  senv.phi = ScalarProfile::custom([=](const VecN& x) {
    const double r = x.norm();
    const double gv = std::abs(gfun->value_at_radius(r));
    const double gd = std::abs(gfun->derivative_at_radius(r));
    const double bb = base_b(x);
    const double core = 2.0 * std::pow(base_phi(x), p) + std::pow(2.0 * bb * gv, p) +
                        drift_cost * std::pow(gd, p);
    return std::pow(core, 1.0 / p) + std::pow(beta_c * std::pow(gd, p - 1.0), 1.0 / (p - 1.0));
  });
  senv.phi.name = "shifted(" + base_phi.name + ")";
  shifted.envelope = std::move(senv);

  std::vector<double> psi_shifted(psi_raw.size());
  for (std::size_t i = 0; i < psi_raw.size(); ++i)
    psi_shifted[i] = (psi_raw[i] == Obstacle::unconstrained_marker())
                         ? Obstacle::unconstrained_marker()
                         : psi_raw[i] - g.coeffs()[i];
  Obstacle ob(mesh, std::move(psi_shifted));
  ob.shift_ = g;
  return {std::move(shifted), std::move(ob)};
}

namespace {

// Projected residual of the complementarity system: R_i off contact,
// min(R_i, 0) on contact (the multiplier may be nonnegative there).
Eigen::VectorXd projected_residual(const Eigen::VectorXd& R, const DiscreteFunction& u,
                                   const Obstacle& obstacle) {
  const Mesh& mesh = *u.mesh();
  Eigen::VectorXd pr = R;
  for (int i = 0; i < mesh.n_nodes(); ++i) {
    if (mesh.is_boundary_node(i)) {
      pr[i] = 0.0;
      continue;
    }
    if (obstacle.node_constrained(i) &&
        u.coeffs()[static_cast<std::size_t>(i)] <= obstacle.psi()[static_cast<std::size_t>(i)])
      pr[i] = std::min(pr[i], 0.0);
  }
  return pr;
}

}  // namespace

ViResult vi_frozen_solve(const QuasilinearField& field, const DiscreteFunction& v,
                         const RhsFunctional& rhs, const Obstacle& obstacle,
                         const SolveConfig& config) {
  config.validate();
  if (v.mesh() != obstacle.mesh()) throw MeshMismatch("vi_frozen_solve: obstacle mesh mismatch");
  if (obstacle.is_unconstrained()) {
    FrozenResult fr = frozen_solve(field, v, rhs, config, v);
    ViStats st;
    st.outer_iterations = fr.stats.iterations;
    st.projected_residual = fr.stats.final_residual;
    return ViResult{std::move(fr.u), st};
  }

  const Mesh& mesh = *v.mesh();
  DiscreteFunction u = v;
  obstacle.project(u);

  ViStats stats;
  const int max_outer = config.max_newton * 4;
  double merit_prev = std::numeric_limits<double>::infinity();
  int no_progress = 0;

  for (int outer = 0; outer < max_outer; ++outer) {
    stats.outer_iterations = outer;
    Eigen::VectorXd R = assemble_residual(field, v, u, rhs);
    Eigen::VectorXd pr = projected_residual(R, u, obstacle);
    const double merit = pr.norm();
    stats.projected_residual = merit;
    if (merit <= config.newton_tol) break;

    Eigen::SparseMatrix<double> J = assemble_jacobian(field, v, u, rhs);
    const Eigen::VectorXd diag = J.diagonal();

    // Active set: clamped nodes whose scaled multiplier keeps the clamp.
    std::vector<char> active(static_cast<std::size_t>(mesh.n_nodes()), 0);
    for (int i = 0; i < mesh.n_nodes(); ++i) {
      if (mesh.is_boundary_node(i) || !obstacle.node_constrained(i)) continue;
      const double gap = u.coeffs()[static_cast<std::size_t>(i)] - obstacle.psi()[static_cast<std::size_t>(i)];
      const double lambda = R[i] / std::max(std::abs(diag[i]), 1e-300);
      if (gap < lambda) active[static_cast<std::size_t>(i)] = 1;
    }

    // Newton step on the inactive set; active nodes move straight to psi.
    for (int k = 0; k < J.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(J, k); it; ++it)
        if (active[static_cast<std::size_t>(it.row())] || active[static_cast<std::size_t>(it.col())])
          it.valueRef() = (it.row() == it.col()) ? 1.0 : 0.0;
    Eigen::VectorXd rhs_vec = -R;
    for (int i = 0; i < mesh.n_nodes(); ++i)
      if (active[static_cast<std::size_t>(i)])
        rhs_vec[i] = obstacle.psi()[static_cast<std::size_t>(i)] - u.coeffs()[static_cast<std::size_t>(i)];

    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(J);
    Eigen::VectorXd d;
    bool have_newton_dir = false;
    if (lu.info() == Eigen::Success) {
      d = lu.solve(rhs_vec);
      have_newton_dir = d.allFinite();
    }
    if (!have_newton_dir) {
      // Diagonal-preconditioned projected gradient direction.
      d = rhs_vec;
      for (int i = 0; i < d.size(); ++i) d[i] /= std::max(std::abs(diag[i]), 1e-300);
    }

    // Projected backtracking on the merit.
    double s = 1.0;
    bool accepted = false;
    for (int bt = 0; bt <= config.max_backtrack; ++bt) {
      DiscreteFunction trial = u;
      for (int i = 0; i < d.size(); ++i) trial.coeffs_mut()[static_cast<std::size_t>(i)] += s * d[i];
      obstacle.project(trial);
      const Eigen::VectorXd Rt = assemble_residual(field, v, trial, rhs);
      const double mt = projected_residual(Rt, trial, obstacle).norm();
      if (std::isfinite(mt) && mt <= (1.0 - config.armijo * s) * merit) {
        u = std::move(trial);
        accepted = true;
        break;
      }
      s *= config.backtrack_factor;
    }
    if (!accepted) {
      if (++no_progress >= 3)
        throw ProjectionStalled("vi_frozen_solve: projected iteration stopped making progress");
    } else {
      no_progress = 0;
    }
    if (merit >= merit_prev * (1.0 - 1e-16) && !accepted)
      throw ProjectionStalled("vi_frozen_solve: merit stagnated");
    merit_prev = merit;
  }

  if (stats.projected_residual > config.newton_tol) {
    Eigen::VectorXd R = assemble_residual(field, v, u, rhs);
    stats.projected_residual = projected_residual(R, u, obstacle).norm();
    if (stats.projected_residual > config.newton_tol)
      throw ProjectionStalled("vi_frozen_solve: projected residual did not reach tolerance");
  }
  stats.contact_nodes = 0;
  for (int i = 0; i < mesh.n_nodes(); ++i)
    if (obstacle.node_constrained(i) &&
        u.coeffs()[static_cast<std::size_t>(i)] <= obstacle.psi()[static_cast<std::size_t>(i)])
      ++stats.contact_nodes;
  return ViResult{std::move(u), stats};
}

FixedPointResult vi_truncation_scheme(const QuasilinearField& field, const RhsFunctional& rhs,
                                      const Obstacle& obstacle, const SolveConfig& config) {
  config.validate();
  if (obstacle.is_unconstrained()) return truncation_continuation(field, rhs, config);

  const auto mesh = rhs.mesh();
  const StructuralEnvelope& env = field.envelope;
  SobolevConstant S = config.sobolev ? *config.sobolev : sobolev_constant(env.N, env.p, mesh);
  const TruncationLevelChoice gate =
      choose_truncation_level(env.sample_b_for_measure(*mesh), env.alpha, env.p, S);

  SolveReport report;
  report.sobolev_used = S;
  report.distance_gate_level = gate.level;
  report.distance_measured = gate.distance;
  report.distance_threshold = gate.threshold;

  const double b_max = env.sample_b(*mesh).max_abs_value();  // theta == 1 iff n >= this
  auto shared = std::make_shared<const QuasilinearField>(field);
  DiscreteFunction u = obstacle.witness();
  std::optional<DiscreteFunction> prev;

  for (double n : config.truncation_schedule) {
    const QuasilinearField field_n = truncate_field(shared, n);

    // Damped fixed point over the frozen-coefficient VI.
    LevelRecord level;
    level.level = n;
    StageRecord stage;
    bool stage_ok = false;
    for (int k = 0; k < config.max_picard; ++k) {
      ViResult vr = vi_frozen_solve(field_n, u, rhs, obstacle, config);
      stage.newton_iterations += vr.stats.outer_iterations;
      stage.final_residual = vr.stats.projected_residual;
      const double gap = w1p_distance(vr.u, u, env.p);
      stage.picard_increments.push_back(gap);
      stage.iterate_norms.push_back(norm_w1p(u, env.p));
      if (gap <= config.picard_tol) {
        u = std::move(vr.u);
        stage_ok = true;
        break;
      }
      DiscreteFunction next = u;
      for (std::size_t i = 0; i < next.coeffs().size(); ++i)
        next.coeffs_mut()[i] = (1.0 - config.relaxation) * u.coeffs()[i] +
                               config.relaxation * vr.u.coeffs()[i];
      obstacle.project(next);  // convex combination of admissibles is admissible
      u = std::move(next);
    }
    stage.converged = stage_ok;
    level.stages.push_back(std::move(stage));
    if (!stage_ok) {
      report.stagnated = true;
      report.levels.push_back(std::move(level));
      throw Stagnated("vi_truncation_scheme: fixed point did not converge at level " +
                          std::to_string(n),
                      report);
    }

    level.norm_w1p = norm_w1p(u, env.p);
    const Eigen::VectorXd R_full = assemble_full_residual(field, u, rhs);
    level.full_residual_norm = projected_residual(R_full, u, obstacle).norm();
    if (prev) level.diff_from_previous = w1p_distance(u, *prev, env.p);
    level.monitor = apriori_monitor(u, env, default_sigma_grid(u, config.sigma_levels),
                                    config.monitor_cap);
    report.uniform_bound = std::max(report.uniform_bound, level.norm_w1p);
    if (!report.levels.empty() && report.levels.back().norm_w1p > 0.0)
      report.uniform_bound_growth =
          std::abs(level.norm_w1p - report.levels.back().norm_w1p) / report.levels.back().norm_w1p;

    const bool truncation_exact = n >= b_max;
    const bool cauchy = prev && level.diff_from_previous < config.picard_tol;
    const bool residual_ok = level.full_residual_norm <= 10.0 * config.newton_tol;
    report.levels.push_back(std::move(level));
    prev = u;

    if ((truncation_exact || cauchy) && residual_ok) {
      report.converged = true;
      if (!obstacle.admissible(u)) throw Error("vi_truncation_scheme: admissibility lost");
      return FixedPointResult{std::move(u), std::move(report)};
    }
  }
  throw SchemeNotCauchy("vi_truncation_scheme: schedule exhausted before stabilization", report);
}

ComplementarityReport complementarity_residual(const DiscreteFunction& u, const Obstacle& obstacle,
                                               const QuasilinearField& field,
                                               const RhsFunctional& rhs,
                                               const std::vector<DiscreteFunction>& probes,
                                               unsigned seed, int random_probes) {
  const auto mesh = u.mesh();
  if (obstacle.mesh() != mesh) throw MeshMismatch("complementarity_residual: mesh mismatch");
  const double p = field.envelope.p;
  const Eigen::VectorXd R = assemble_full_residual(field, u, rhs);

  auto slack_of = [&](const DiscreteFunction& w, const std::string& label) {
    if (!obstacle.admissible(w)) throw NotAdmissible("complementarity_residual: probe " + label);
    double s = 0.0;
    for (int i = 0; i < mesh->n_nodes(); ++i)
      s += R[i] * (w.coeffs()[static_cast<std::size_t>(i)] - u.coeffs()[static_cast<std::size_t>(i)]);
    const double dn = w1p_distance(w, u, p);
    return ProbeSlack{label, s, s / std::max(1.0, dn)};
  };

  ComplementarityReport rep;
  for (std::size_t k = 0; k < probes.size(); ++k)
    rep.slacks.push_back(slack_of(probes[k], "caller:" + std::to_string(k)));

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  double scale = 1e-3;
  for (double c : u.coeffs()) scale = std::max(scale, std::abs(c));
  auto random_admissible = [&] {
    DiscreteFunction v = DiscreteFunction::zeros(mesh);
    for (int i = 0; i < mesh->n_nodes(); ++i)
      v.coeffs_mut()[static_cast<std::size_t>(i)] = scale * unit(rng);
    obstacle.project(v);
    return v;
  };

  for (int k = 0; k < random_probes; ++k)
    rep.slacks.push_back(slack_of(random_admissible(), "random:" + std::to_string(k)));

  // Probe family w = u - lambda*arctan((u - v)/lambda): admissible whenever v
  // is, since the clipped decrement never undershoots min(u, v).
  int gk = 0;
  for (double lambda : {0.1, 1.0, 10.0}) {
    for (int rep_i = 0; rep_i < 3; ++rep_i) {
      const DiscreteFunction v = random_admissible();
      DiscreteFunction w = u;
      for (std::size_t i = 0; i < w.coeffs().size(); ++i) {
        const double diff = u.coeffs()[i] - v.coeffs()[i];
        w.coeffs_mut()[i] = u.coeffs()[i] - lambda * std::atan(diff / lambda);
      }
      w.enforce_boundary();
      rep.slacks.push_back(slack_of(w, "arctan:" + std::to_string(gk++)));
    }
  }

  rep.min_slack = std::numeric_limits<double>::infinity();
  rep.min_normalized = std::numeric_limits<double>::infinity();
  for (const ProbeSlack& s : rep.slacks) {
    rep.min_slack = std::min(rep.min_slack, s.slack);
    rep.min_normalized = std::min(rep.min_normalized, s.normalized);
  }

  for (int i = 0; i < mesh->n_nodes(); ++i)
    if (obstacle.node_constrained(i) &&
        u.coeffs()[static_cast<std::size_t>(i)] - obstacle.psi()[static_cast<std::size_t>(i)] <= 1e-10)
      ++rep.contact_nodes;
  for (int c = 0; c < mesh->n_cells(); ++c) {
    const auto nodes = mesh->cell_nodes(c);
    bool all_contact = true;
    for (int a = 0; a < mesh->nodes_per_cell(); ++a) {
      const int i = nodes[static_cast<std::size_t>(a)];
      if (!obstacle.node_constrained(i) ||
          u.coeffs()[static_cast<std::size_t>(i)] - obstacle.psi()[static_cast<std::size_t>(i)] > 1e-10) {
        all_contact = false;
        break;
      }
    }
    if (all_contact)
      for (int q = mesh->quad_begin(c); q < mesh->quad_end(c); ++q)
        rep.contact_measure += mesh->quad_weight(q);
  }
  return rep;
}

}  // namespace qelab
