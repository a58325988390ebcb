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

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "qelab/fields.hpp"
#include "qelab/function.hpp"

namespace qelab {

/// Residual of the frozen-coefficient weak form: component i is
///   int <A(x, v(x), grad u), grad w_i> - <Phi, w_i>
/// for interior hat functions w_i; rows of Dirichlet nodes are zeroed.
/// Assembly order is fixed (cells ascending), so results are bitwise
/// deterministic.
Eigen::VectorXd assemble_residual(const QuasilinearField& field, const DiscreteFunction& v_frozen,
                                  const DiscreteFunction& u, const RhsFunctional& rhs);

/// Linearization of the residual in u. Uses the field's analytic
/// xi-derivative when present, otherwise column finite differences at each
/// quadrature point. Dirichlet rows/columns carry identity.
Eigen::SparseMatrix<double> assemble_jacobian(const QuasilinearField& field,
                                              const DiscreteFunction& v_frozen,
                                              const DiscreteFunction& u,
                                              const RhsFunctional& rhs);

/// Weak action int <A(x, u, grad u), grad w> - <Phi, w> of the full
/// (non-frozen) operator against one test function.
double weak_form_action(const QuasilinearField& field, const DiscreteFunction& u,
                        const RhsFunctional& rhs, const DiscreteFunction& w);

/// Full-field residual vector (v_frozen = u itself).
Eigen::VectorXd assemble_full_residual(const QuasilinearField& field, const DiscreteFunction& u,
                                       const RhsFunctional& rhs);

// Linear scalar forms used by the verification cases.

/// Stiffness matrix int grad w_j . grad w_i (Dirichlet rows/cols identity).
Eigen::SparseMatrix<double> assemble_stiffness(const Mesh& mesh);
/// Mass matrix int w_j w_i (no boundary treatment).
Eigen::SparseMatrix<double> assemble_mass(const Mesh& mesh);
/// Drift form int (d(x) . grad w_j) w_i for a given vector profile d.
Eigen::SparseMatrix<double> assemble_drift(const Mesh& mesh,
                                           const std::function<VecN(const VecN&)>& drift);
/// Adjoint-drift form int u (d(x) . grad w_i): transpose placement of the
/// drift, as appears in divergence-form drift operators.
Eigen::SparseMatrix<double> assemble_div_drift(const Mesh& mesh,
                                               const std::function<VecN(const VecN&)>& drift);

/// Applies homogeneous Dirichlet elimination: zero rows/columns of boundary
/// nodes with unit diagonal, and zeroes those entries of b.
void apply_dirichlet(const Mesh& mesh, Eigen::SparseMatrix<double>& A, Eigen::VectorXd* b);

}  // namespace qelab
