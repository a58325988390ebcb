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

#include <array>
#include <iosfwd>
#include <memory>
#include <vector>

#include "qelab/common.hpp"

namespace qelab {

/// P1 mesh with precomputed quadrature.
///
/// Two kinds:
///  - radial: the N-ball with radial data reduced to [0, R]; cells are
///    intervals, integration carries the weight N*omega_N*r^{N-1}, the only
///    Dirichlet node is r = R (natural condition at r = 0). Gauss points are
///    interior, so the innermost cell never evaluates at r = 0.
///  - planar: triangulated 2D domain, edge-midpoint quadrature (degree 2).
///
/// Meshes are immutable after construction and shared by const pointer.
class Mesh {
 public:
  enum class Kind { radial, planar };

  static std::shared_ptr<const Mesh> radial(int N, double R, int cells, double grading = 1.0);
  /// Structured triangulation of the disc of radius R: ring i carries 6i
  /// nodes, boundary = outermost ring.
  static std::shared_ptr<const Mesh> disc(double R, int rings);
  static std::shared_ptr<const Mesh> planar(std::vector<std::array<double, 2>> vertices,
                                            std::vector<std::array<int, 3>> triangles);

  Kind kind() const { return kind_; }
  int ambient_dim() const { return ambient_dim_; }  // N for radial, 2 for planar
  int coord_dim() const { return coord_dim_; }      // 1 for radial, 2 for planar
  double radius() const { return radius_; }
  double domain_measure() const { return domain_measure_; }

  int n_nodes() const { return n_nodes_; }
  int n_cells() const { return n_cells_; }
  int nodes_per_cell() const { return kind_ == Kind::radial ? 2 : 3; }
  std::array<int, 3> cell_nodes(int c) const;
  double cell_diameter(int c) const;
  double max_cell_diameter() const;

  bool is_boundary_node(int i) const { return boundary_flag_[static_cast<std::size_t>(i)] != 0; }
  const std::vector<int>& boundary_nodes() const { return boundary_nodes_; }

  // Radial node radii / planar vertex coordinates.
  const std::vector<double>& node_r() const { return node_r_; }
  const std::vector<std::array<double, 2>>& node_xy() const { return node_xy_; }
  const std::vector<std::array<int, 3>>& triangles() const { return tri_; }

  // Quadrature, flattened over cells.
  int n_quad() const { return static_cast<int>(qw_.size()); }
  int quad_begin(int c) const { return qstart_[static_cast<std::size_t>(c)]; }
  int quad_end(int c) const { return qstart_[static_cast<std::size_t>(c) + 1]; }
  double quad_weight(int q) const { return qw_[static_cast<std::size_t>(q)]; }
  /// Coordinates of quadrature point q (coord_dim entries).
  const double* quad_coord(int q) const { return &qx_[static_cast<std::size_t>(q) * static_cast<std::size_t>(coord_dim_)]; }
  /// Basis value of local node a at quad point q.
  double quad_basis(int q, int a) const {
    return qbasis_[static_cast<std::size_t>(q) * static_cast<std::size_t>(nodes_per_cell()) + static_cast<std::size_t>(a)];
  }
  /// Basis gradient (coord_dim entries) of local node a at quad point q.
  const double* quad_basis_grad(int q, int a) const {
    return &qgrad_[(static_cast<std::size_t>(q) * static_cast<std::size_t>(nodes_per_cell()) + static_cast<std::size_t>(a)) * static_cast<std::size_t>(coord_dim_)];
  }
  int quad_cell(int q) const { return qcell_[static_cast<std::size_t>(q)]; }

  /// Ambient-space position of quadrature point q for field evaluation:
  /// radial points embed as r*e_1 in R^N.
  VecN quad_position(int q) const;

  /// Radial only: index of the cell containing radius r.
  int locate_radial_cell(double r) const;

  void write_csv(std::ostream& vertices_out, std::ostream& cells_out) const;
  static std::shared_ptr<const Mesh> read_csv(std::istream& vertices_in, std::istream& cells_in);

 private:
  Mesh() = default;
  void build_radial_quadrature();
  void build_planar_quadrature();
  void validate() const;

  Kind kind_ = Kind::radial;
  int ambient_dim_ = 0;
  int coord_dim_ = 0;
  double radius_ = 0.0;
  double domain_measure_ = 0.0;
  int n_nodes_ = 0;
  int n_cells_ = 0;
  std::vector<double> node_r_;
  std::vector<std::array<double, 2>> node_xy_;
  std::vector<std::array<int, 3>> tri_;
  std::vector<char> boundary_flag_;
  std::vector<int> boundary_nodes_;
  std::vector<int> qstart_;
  std::vector<int> qcell_;
  std::vector<double> qw_;
  std::vector<double> qx_;
  std::vector<double> qbasis_;
  std::vector<double> qgrad_;
};

}  // namespace qelab
