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

#include "qelab/solver.hpp"

namespace qelab {

/// Lower obstacle for the constrained problem. Nodal values live in
/// [-inf, 0]; the marker `unconstrained_marker()` (-inf, a first-class state,
/// never a large negative number) releases a node entirely. With psi <= 0
/// everywhere the zero function witnesses that the admissible set is
/// nonempty.
class Obstacle {
 public:
  static double unconstrained_marker() { return -std::numeric_limits<double>::infinity(); }

  /// Validates psi <= 0 at every node (the shifted normal form).
  Obstacle(std::shared_ptr<const Mesh> mesh, std::vector<double> psi);
  /// psi == -inf everywhere: the constraint set is the whole space.
  static Obstacle unconstrained(std::shared_ptr<const Mesh> mesh);
  static Obstacle constant(std::shared_ptr<const Mesh> mesh, double level);

  const std::shared_ptr<const Mesh>& mesh() const { return mesh_; }
  const std::vector<double>& psi() const { return psi_; }
  bool is_unconstrained() const { return all_unconstrained_; }
  bool node_constrained(int i) const {
    return psi_[static_cast<std::size_t>(i)] != unconstrained_marker();
  }

  /// Witness of admissibility (the zero function).
  DiscreteFunction witness() const { return DiscreteFunction::zeros(mesh_); }

  /// Nodal admissibility u >= psi, exact (no tolerance).
  bool admissible(const DiscreteFunction& u) const;
  /// Exact nodal projection onto the admissible set: max(u, psi).
  void project(DiscreteFunction& u) const;

  /// The shift that produced this obstacle, when shift_obstacle built it.
  const std::optional<DiscreteFunction>& original_shift() const { return shift_; }

 private:
  std::shared_ptr<const Mesh> mesh_;
  std::vector<double> psi_;
  bool all_unconstrained_ = false;
  std::optional<DiscreteFunction> shift_;
  friend std::pair<QuasilinearField, Obstacle> shift_obstacle(const QuasilinearField&,
                                                              const std::vector<double>&,
                                                              const DiscreteFunction&);
};

/// Reduction to a nonpositive obstacle: given raw psi and an admissible
/// g >= psi in W^{1,p}_0, returns the shifted field
///   A~(x,u,xi) = A(x, u + g(x), xi + grad g(x))
/// and the obstacle psi - g <= 0. Solving the shifted problem and adding g
/// back solves the original. Throws NotAdmissible when g < psi at a node or
/// g violates the zero boundary.
std::pair<QuasilinearField, Obstacle> shift_obstacle(const QuasilinearField& field,
                                                     const std::vector<double>& psi_raw,
                                                     const DiscreteFunction& g);

struct ViStats {
  int outer_iterations = 0;
  double projected_residual = 0.0;
  int contact_nodes = 0;
};

struct ViResult {
  DiscreteFunction u;
  ViStats stats;
};

/// Frozen-coefficient variational inequality: find u >= psi (exactly, at
/// every node) with
///   int <A(x, v, grad u), grad (w - u)> >= <Phi, w - u>   for all w >= psi.
///
/// Discrete engine: primal active-set iteration on the complementarity
/// system (clamped nodes solve u = psi, free nodes solve the equation by
/// Newton), globalized by projected diagonal-preconditioned damping;
/// convergence is measured by the projected residual min(R, 0) on contact /
/// R off contact. Throws ProjectionStalled when no progress is possible.
ViResult vi_frozen_solve(const QuasilinearField& field, const DiscreteFunction& v,
                         const RhsFunctional& rhs, const Obstacle& obstacle,
                         const SolveConfig& config);

/// Truncated-coefficient scheme for the obstacle problem: outer structure of
/// truncation_continuation with the frozen solve replaced by the projected
/// one. Admissibility is exact at every level; the distance-condition gate
/// applies unchanged.
FixedPointResult vi_truncation_scheme(const QuasilinearField& field, const RhsFunctional& rhs,
                                      const Obstacle& obstacle, const SolveConfig& config);

struct ProbeSlack {
  std::string label;
  double slack;        // int <A(x,u,grad u), grad(w-u)> - <Phi, w-u>
  double normalized;   // slack / max(1, ||w-u||_{W^{1,p}})
};

struct ComplementarityReport {
  std::vector<ProbeSlack> slacks;
  double min_slack = 0.0;
  double min_normalized = 0.0;
  int contact_nodes = 0;        // nodes with u - psi <= 1e-10
  double contact_measure = 0.0; // total measure of cells fully in contact
};

/// Signed complementarity slacks of u against admissible probes: the caller's
/// probes plus the generated family w = u - lambda*arctan((u - v)/lambda)
/// for random admissible v and lambda in {0.1, 1, 10}. Probes are checked
/// for admissibility (NotAdmissible otherwise).
ComplementarityReport complementarity_residual(const DiscreteFunction& u, const Obstacle& obstacle,
                                               const QuasilinearField& field,
                                               const RhsFunctional& rhs,
                                               const std::vector<DiscreteFunction>& probes,
                                               unsigned seed = 12345, int random_probes = 50);

}  // namespace qelab
