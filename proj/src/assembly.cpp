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
#include "qelab/assembly.hpp"

#include <cmath>
#include <vector>

namespace qelab {

namespace {

void check_same_mesh(const DiscreteFunction& a, const DiscreteFunction& b) {
  if (a.mesh() != b.mesh()) throw MeshMismatch("assembly: functions live on different meshes");
}

VecN embed_gradient(const Mesh& mesh, const VecN& g) {
  // Radial meshes carry scalar gradients; the field sees them along e_1.
  if (mesh.kind() == Mesh::Kind::radial) return VecN::axis(mesh.ambient_dim(), 0, g[0]);
  return g;
}

MatN fd_xi_jacobian(const QuasilinearField& field, const VecN& x, double u, const VecN& xi) {
  const int n = xi.size();
  MatN J(n);
  const VecN A0 = field.eval(x, u, xi);
  const double eps = 1e-7 * std::max(1.0, xi.norm());
  for (int j = 0; j < n; ++j) {
    VecN xj = xi;
    xj[j] += eps;
    const VecN Aj = field.eval(x, u, xj);
    for (int i = 0; i < n; ++i) J(i, j) = (Aj[i] - A0[i]) / eps;
  }
  return J;
}

}  // namespace

Eigen::VectorXd assemble_residual(const QuasilinearField& field, const DiscreteFunction& v_frozen,
                                  const DiscreteFunction& u, const RhsFunctional& rhs) {
  check_same_mesh(v_frozen, u);
  if (u.mesh() != rhs.mesh()) throw MeshMismatch("assemble_residual: rhs mesh mismatch");
  const Mesh& mesh = *u.mesh();
  const int nloc = mesh.nodes_per_cell();
  const int cd = mesh.coord_dim();

  Eigen::VectorXd R = Eigen::VectorXd::Zero(mesh.n_nodes());
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto nodes = mesh.cell_nodes(c);
    for (int q = mesh.quad_begin(c); q < mesh.quad_end(c); ++q) {
      const VecN x = mesh.quad_position(q);
      const double v = v_frozen.value_at_quad(q);
      const VecN gu = embed_gradient(mesh, u.gradient_at_quad(q));
      const VecN A = field.eval(x, v, gu);
      const double w = mesh.quad_weight(q);
      for (int a = 0; a < nloc; ++a) {
        const double* ga = mesh.quad_basis_grad(q, a);
        double dot = 0.0;
        for (int k = 0; k < cd; ++k) dot += A[k] * ga[k];
        R[nodes[static_cast<std::size_t>(a)]] += w * dot;
      }
    }
  }
  for (int i = 0; i < mesh.n_nodes(); ++i) R[i] -= rhs.node_actions()[static_cast<std::size_t>(i)];
  for (int i : mesh.boundary_nodes()) R[i] = 0.0;
  return R;
}

Eigen::SparseMatrix<double> assemble_jacobian(const QuasilinearField& field,
                                              const DiscreteFunction& v_frozen,
                                              const DiscreteFunction& u,
                                              const RhsFunctional& rhs) {
  check_same_mesh(v_frozen, u);
  if (u.mesh() != rhs.mesh()) throw MeshMismatch("assemble_jacobian: rhs mesh mismatch");
  const Mesh& mesh = *u.mesh();
  const int nloc = mesh.nodes_per_cell();
  const int cd = mesh.coord_dim();

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(mesh.n_quad()) * static_cast<std::size_t>(nloc * nloc));
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto nodes = mesh.cell_nodes(c);
    for (int q = mesh.quad_begin(c); q < mesh.quad_end(c); ++q) {
      const VecN x = mesh.quad_position(q);
      const double v = v_frozen.value_at_quad(q);
      const VecN gu = embed_gradient(mesh, u.gradient_at_quad(q));
      const MatN D = field.d_xi ? field.d_xi(x, v, gu) : fd_xi_jacobian(field, x, v, gu);
      const double w = mesh.quad_weight(q);
      for (int a = 0; a < nloc; ++a) {
        const int ia = nodes[static_cast<std::size_t>(a)];
        if (mesh.is_boundary_node(ia)) continue;
        const double* ga = mesh.quad_basis_grad(q, a);
        for (int b = 0; b < nloc; ++b) {
          const int jb = nodes[static_cast<std::size_t>(b)];
          if (mesh.is_boundary_node(jb)) continue;
          const double* gb = mesh.quad_basis_grad(q, b);
          double s = 0.0;
          for (int i = 0; i < cd; ++i)
            for (int j = 0; j < cd; ++j) s += ga[i] * D(i, j) * gb[j];
          trip.emplace_back(ia, jb, w * s);
        }
      }
    }
  }
  for (int i : mesh.boundary_nodes()) trip.emplace_back(i, i, 1.0);
  Eigen::SparseMatrix<double> J(mesh.n_nodes(), mesh.n_nodes());
  J.setFromTriplets(trip.begin(), trip.end());
  return J;
}

double weak_form_action(const QuasilinearField& field, const DiscreteFunction& u,
                        const RhsFunctional& rhs, const DiscreteFunction& w) {
  check_same_mesh(u, w);
  const Eigen::VectorXd R = assemble_residual(field, u, u, rhs);
  double s = 0.0;
  for (int i = 0; i < static_cast<int>(w.coeffs().size()); ++i) s += R[i] * w.coeffs()[static_cast<std::size_t>(i)];
  return s;
}

Eigen::VectorXd assemble_full_residual(const QuasilinearField& field, const DiscreteFunction& u,
                                       const RhsFunctional& rhs) {
  return assemble_residual(field, u, u, rhs);
}

namespace {

template <typename CellKernel>
Eigen::SparseMatrix<double> assemble_bilinear(const Mesh& mesh, CellKernel&& kernel) {
  const int nloc = mesh.nodes_per_cell();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(mesh.n_quad()) * static_cast<std::size_t>(nloc * nloc));
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto nodes = mesh.cell_nodes(c);
    for (int q = mesh.quad_begin(c); q < mesh.quad_end(c); ++q) {
      for (int a = 0; a < nloc; ++a)
        for (int b = 0; b < nloc; ++b)
          trip.emplace_back(nodes[static_cast<std::size_t>(a)], nodes[static_cast<std::size_t>(b)],
                            kernel(q, a, b));
    }
  }
  Eigen::SparseMatrix<double> A(mesh.n_nodes(), mesh.n_nodes());
  A.setFromTriplets(trip.begin(), trip.end());
  return A;
}

}  // namespace

Eigen::SparseMatrix<double> assemble_stiffness(const Mesh& mesh) {
  const int cd = mesh.coord_dim();
  auto A = assemble_bilinear(mesh, [&](int q, int a, int b) {
    const double* ga = mesh.quad_basis_grad(q, a);
    const double* gb = mesh.quad_basis_grad(q, b);
    double s = 0.0;
    for (int k = 0; k < cd; ++k) s += ga[k] * gb[k];
    return mesh.quad_weight(q) * s;
  });
  apply_dirichlet(mesh, A, nullptr);
  return A;
}

Eigen::SparseMatrix<double> assemble_mass(const Mesh& mesh) {
  return assemble_bilinear(mesh, [&](int q, int a, int b) {
    return mesh.quad_weight(q) * mesh.quad_basis(q, a) * mesh.quad_basis(q, b);
  });
}

Eigen::SparseMatrix<double> assemble_drift(const Mesh& mesh,
                                           const std::function<VecN(const VecN&)>& drift) {
  const int cd = mesh.coord_dim();
  return assemble_bilinear(mesh, [&](int q, int a, int b) {
    const VecN d = drift(mesh.quad_position(q));
    const double* gb = mesh.quad_basis_grad(q, b);
    double s = 0.0;
    for (int k = 0; k < cd; ++k) s += d[k] * gb[k];
    return mesh.quad_weight(q) * s * mesh.quad_basis(q, a);
  });
}

Eigen::SparseMatrix<double> assemble_div_drift(const Mesh& mesh,
                                               const std::function<VecN(const VecN&)>& drift) {
  const int cd = mesh.coord_dim();
  return assemble_bilinear(mesh, [&](int q, int a, int b) {
    const VecN d = drift(mesh.quad_position(q));
    const double* ga = mesh.quad_basis_grad(q, a);
    double s = 0.0;
    for (int k = 0; k < cd; ++k) s += d[k] * ga[k];
    return mesh.quad_weight(q) * s * mesh.quad_basis(q, b);
  });
}

void apply_dirichlet(const Mesh& mesh, Eigen::SparseMatrix<double>& A, Eigen::VectorXd* b) {
  for (int k = 0; k < A.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it) {
      const bool br = mesh.is_boundary_node(static_cast<int>(it.row()));
      const bool bc = mesh.is_boundary_node(static_cast<int>(it.col()));
      if (br || bc) it.valueRef() = (it.row() == it.col()) ? 1.0 : 0.0;
    }
  }
  A.prune(0.0);
  if (b)
    for (int i : mesh.boundary_nodes()) (*b)[i] = 0.0;
}

}  // namespace qelab
