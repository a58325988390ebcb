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
#include "qelab/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "qelab/csv.hpp"

namespace qelab {

namespace {

// 5-point Gauss-Legendre on [-1, 1]: exact through degree 9, which covers the
// radial weight r^{N-1} times P1*P1 integrands for all supported N <= kMaxDim.
constexpr std::array<double, 5> kGaussX = {-0.90617984593866396, -0.53846931010568311, 0.0,
                                           0.53846931010568311, 0.90617984593866396};
constexpr std::array<double, 5> kGaussW = {0.23692688505618911, 0.47862867049936647,
                                           0.56888888888888889, 0.47862867049936647,
                                           0.23692688505618911};

}  // namespace

std::shared_ptr<const Mesh> Mesh::radial(int N, double R, int cells, double grading) {
  if (N < 2 || N > kMaxDim) throw Error("Mesh::radial: dimension must be in [2, 8]");
  if (!(R > 0.0)) throw Error("Mesh::radial: positive radius required");
  if (cells < 1) throw Error("Mesh::radial: at least one cell required");
  if (!(grading > 0.0 && grading <= 1.0)) throw Error("Mesh::radial: grading in (0,1]");

  auto mesh = std::shared_ptr<Mesh>(new Mesh());
  mesh->kind_ = Kind::radial;
  mesh->ambient_dim_ = N;
  mesh->coord_dim_ = 1;
  mesh->radius_ = R;
  mesh->n_cells_ = cells;
  mesh->n_nodes_ = cells + 1;
  mesh->node_r_.resize(static_cast<std::size_t>(cells) + 1);
  if (grading == 1.0) {
    for (int i = 0; i <= cells; ++i)
      mesh->node_r_[static_cast<std::size_t>(i)] = R * static_cast<double>(i) / cells;
  } else {
    mesh->node_r_[0] = 0.0;
    for (int i = 1; i <= cells; ++i)
      mesh->node_r_[static_cast<std::size_t>(i)] = R * std::pow(grading, static_cast<double>(cells - i));
    mesh->node_r_[static_cast<std::size_t>(cells)] = R;
  }
  mesh->boundary_flag_.assign(static_cast<std::size_t>(mesh->n_nodes_), 0);
  mesh->boundary_flag_.back() = 1;
  mesh->boundary_nodes_ = {cells};
  mesh->domain_measure_ = unit_ball_measure(N) * std::pow(R, N);
  mesh->build_radial_quadrature();
  mesh->validate();
  return mesh;
}

void Mesh::build_radial_quadrature() {
  const int N = ambient_dim_;
  const double surface = N * unit_ball_measure(N);  // |S^{N-1}|
  const int q_per_cell = static_cast<int>(kGaussX.size());
  qstart_.assign(static_cast<std::size_t>(n_cells_) + 1, 0);
  for (int c = 0; c < n_cells_; ++c) {
    const double a = node_r_[static_cast<std::size_t>(c)];
    const double b = node_r_[static_cast<std::size_t>(c) + 1];
    const double h = b - a;
    if (!(h > 0.0)) throw Error("Mesh::radial: degenerate cell");
    for (int g = 0; g < q_per_cell; ++g) {
      const double r = 0.5 * (a + b) + 0.5 * h * kGaussX[static_cast<std::size_t>(g)];
      const double w = 0.5 * h * kGaussW[static_cast<std::size_t>(g)] * surface * std::pow(r, N - 1);
      qcell_.push_back(c);
      qw_.push_back(w);
      qx_.push_back(r);
      // hat functions on [a, b]
      qbasis_.push_back((b - r) / h);
      qbasis_.push_back((r - a) / h);
      qgrad_.push_back(-1.0 / h);
      qgrad_.push_back(1.0 / h);
    }
    qstart_[static_cast<std::size_t>(c) + 1] = static_cast<int>(qw_.size());
  }
}

std::shared_ptr<const Mesh> Mesh::disc(double R, int rings) {
  if (!(R > 0.0)) throw Error("Mesh::disc: positive radius required");
  if (rings < 1) throw Error("Mesh::disc: at least one ring required");

  std::vector<std::array<double, 2>> verts;
  std::vector<std::array<int, 3>> tris;
  verts.push_back({0.0, 0.0});
  std::vector<int> ring_start(static_cast<std::size_t>(rings) + 1, 0);
  for (int i = 1; i <= rings; ++i) {
    ring_start[static_cast<std::size_t>(i)] = static_cast<int>(verts.size());
    const int n = 6 * i;
    const double r = R * static_cast<double>(i) / rings;
    for (int k = 0; k < n; ++k) {
      const double th = 2.0 * M_PI * k / n;
      verts.push_back({r * std::cos(th), r * std::sin(th)});
    }
  }
  // Innermost fan.
  for (int k = 0; k < 6; ++k)
    tris.push_back({0, ring_start[1] + k, ring_start[1] + (k + 1) % 6});
  // Between rings: advance two angular pointers, always closing the smaller
  // leading angle first.
  for (int i = 2; i <= rings; ++i) {
    const int si = ring_start[static_cast<std::size_t>(i) - 1], ni = 6 * (i - 1);
    const int so = ring_start[static_cast<std::size_t>(i)], no = 6 * i;
    int a = 0, b = 0;
    while (a < ni || b < no) {
      const double next_in = static_cast<double>(a + 1) / ni;
      const double next_out = static_cast<double>(b + 1) / no;
      if (b < no && (a == ni || next_out <= next_in)) {
        tris.push_back({so + b % no, so + (b + 1) % no, si + a % ni});
        ++b;
      } else {
        tris.push_back({si + a % ni, so + b % no, si + (a + 1) % ni});
        ++a;
      }
    }
  }
  return planar(std::move(verts), std::move(tris));
}

std::shared_ptr<const Mesh> Mesh::planar(std::vector<std::array<double, 2>> vertices,
                                         std::vector<std::array<int, 3>> triangles) {
  auto mesh = std::shared_ptr<Mesh>(new Mesh());
  mesh->kind_ = Kind::planar;
  mesh->ambient_dim_ = 2;
  mesh->coord_dim_ = 2;
  mesh->node_xy_ = std::move(vertices);
  mesh->tri_ = std::move(triangles);
  mesh->n_nodes_ = static_cast<int>(mesh->node_xy_.size());
  mesh->n_cells_ = static_cast<int>(mesh->tri_.size());
  if (mesh->n_nodes_ < 3 || mesh->n_cells_ < 1) throw Error("Mesh::planar: too few entities");

  // Canonical orientation: positive area.
  for (auto& t : mesh->tri_) {
    const auto& p0 = mesh->node_xy_[static_cast<std::size_t>(t[0])];
    const auto& p1 = mesh->node_xy_[static_cast<std::size_t>(t[1])];
    const auto& p2 = mesh->node_xy_[static_cast<std::size_t>(t[2])];
    const double twice_area =
        (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
    if (twice_area < 0.0) std::swap(t[1], t[2]);
  }

  // Boundary nodes: endpoints of edges that belong to exactly one triangle.
  std::set<std::pair<int, int>> once;
  for (const auto& t : mesh->tri_) {
    for (int e = 0; e < 3; ++e) {
      int u = t[static_cast<std::size_t>(e)], v = t[static_cast<std::size_t>((e + 1) % 3)];
      if (u > v) std::swap(u, v);
      auto key = std::make_pair(u, v);
      if (!once.erase(key)) once.insert(key);
    }
  }
  mesh->boundary_flag_.assign(static_cast<std::size_t>(mesh->n_nodes_), 0);
  for (const auto& e : once) {
    mesh->boundary_flag_[static_cast<std::size_t>(e.first)] = 1;
    mesh->boundary_flag_[static_cast<std::size_t>(e.second)] = 1;
  }
  for (int i = 0; i < mesh->n_nodes_; ++i)
    if (mesh->boundary_flag_[static_cast<std::size_t>(i)]) mesh->boundary_nodes_.push_back(i);

  mesh->build_planar_quadrature();
  mesh->validate();
  return mesh;
}

void Mesh::build_planar_quadrature() {
  qstart_.assign(static_cast<std::size_t>(n_cells_) + 1, 0);
  std::vector<double> areas;
  for (int c = 0; c < n_cells_; ++c) {
    const auto& t = tri_[static_cast<std::size_t>(c)];
    const auto& p0 = node_xy_[static_cast<std::size_t>(t[0])];
    const auto& p1 = node_xy_[static_cast<std::size_t>(t[1])];
    const auto& p2 = node_xy_[static_cast<std::size_t>(t[2])];
    const double a01 = p1[0] - p0[0], a02 = p2[0] - p0[0];
    const double b01 = p1[1] - p0[1], b02 = p2[1] - p0[1];
    const double det = a01 * b02 - a02 * b01;
    const double area = 0.5 * det;
    if (!(area > 0.0)) throw Error("Mesh::planar: degenerate triangle");
    areas.push_back(area);
    // Constant P1 gradients: grad phi_0 = (b01-b02, a02-a01)/det etc.
    const double g0x = (b01 - b02) / det, g0y = (a02 - a01) / det;
    const double g1x = b02 / det, g1y = -a02 / det;
    const double g2x = -b01 / det, g2y = a01 / det;
    // Edge-midpoint rule, weights area/3: exact for degree 2.
    const std::array<std::array<double, 3>, 3> bary = {
        {{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}}};
    for (const auto& l : bary) {
      qcell_.push_back(c);
      qw_.push_back(area / 3.0);
      qx_.push_back(l[0] * p0[0] + l[1] * p1[0] + l[2] * p2[0]);
      qx_.push_back(l[0] * p0[1] + l[1] * p1[1] + l[2] * p2[1]);
      qbasis_.push_back(l[0]);
      qbasis_.push_back(l[1]);
      qbasis_.push_back(l[2]);
      qgrad_.push_back(g0x);
      qgrad_.push_back(g0y);
      qgrad_.push_back(g1x);
      qgrad_.push_back(g1y);
      qgrad_.push_back(g2x);
      qgrad_.push_back(g2y);
    }
    qstart_[static_cast<std::size_t>(c) + 1] = static_cast<int>(qw_.size());
  }
  domain_measure_ = kahan_sum(areas);
}

void Mesh::validate() const {
  std::vector<double> w(qw_);
  const double total = kahan_sum(w);
  if (std::abs(total - domain_measure_) > 1e-10 * domain_measure_)
    throw Error("Mesh: quadrature weights do not reproduce the domain measure");
  if (boundary_nodes_.empty()) throw Error("Mesh: no boundary nodes flagged");
}

std::array<int, 3> Mesh::cell_nodes(int c) const {
  if (kind_ == Kind::radial) return {c, c + 1, -1};
  return tri_[static_cast<std::size_t>(c)];
}

double Mesh::cell_diameter(int c) const {
  if (kind_ == Kind::radial)
    return node_r_[static_cast<std::size_t>(c) + 1] - node_r_[static_cast<std::size_t>(c)];
  const auto& t = tri_[static_cast<std::size_t>(c)];
  double d = 0.0;
  for (int e = 0; e < 3; ++e) {
    const auto& u = node_xy_[static_cast<std::size_t>(t[static_cast<std::size_t>(e)])];
    const auto& v = node_xy_[static_cast<std::size_t>(t[static_cast<std::size_t>((e + 1) % 3)])];
    d = std::max(d, std::hypot(u[0] - v[0], u[1] - v[1]));
  }
  return d;
}

double Mesh::max_cell_diameter() const {
  double d = 0.0;
  for (int c = 0; c < n_cells_; ++c) d = std::max(d, cell_diameter(c));
  return d;
}

VecN Mesh::quad_position(int q) const {
  if (kind_ == Kind::radial) return VecN::axis(ambient_dim_, 0, qx_[static_cast<std::size_t>(q)]);
  VecN x(2);
  x[0] = qx_[static_cast<std::size_t>(q) * 2];
  x[1] = qx_[static_cast<std::size_t>(q) * 2 + 1];
  return x;
}

int Mesh::locate_radial_cell(double r) const {
  if (kind_ != Kind::radial) throw Error("locate_radial_cell: radial mesh required");
  if (r <= 0.0) return 0;
  if (r >= radius_) return n_cells_ - 1;
  const auto it = std::upper_bound(node_r_.begin(), node_r_.end(), r);
  return std::max(0, static_cast<int>(it - node_r_.begin()) - 1);
}

void Mesh::write_csv(std::ostream& vertices_out, std::ostream& cells_out) const {
  CsvWriter vw(vertices_out);
  CsvWriter cw(cells_out);
  if (kind_ == Kind::radial) {
    vw.row(std::vector<std::string>{"node", "r", "boundary"});
    for (int i = 0; i < n_nodes_; ++i)
      vw.row(std::vector<std::string>{std::to_string(i), CsvWriter::format(node_r_[static_cast<std::size_t>(i)]),
                                      is_boundary_node(i) ? "1" : "0"});
    cw.row(std::vector<std::string>{"cell", "n0", "n1"});
    for (int c = 0; c < n_cells_; ++c)
      cw.row(std::vector<std::string>{std::to_string(c), std::to_string(c), std::to_string(c + 1)});
  } else {
    vw.row(std::vector<std::string>{"node", "x", "y", "boundary"});
    for (int i = 0; i < n_nodes_; ++i)
      vw.row(std::vector<std::string>{std::to_string(i),
                                      CsvWriter::format(node_xy_[static_cast<std::size_t>(i)][0]),
                                      CsvWriter::format(node_xy_[static_cast<std::size_t>(i)][1]),
                                      is_boundary_node(i) ? "1" : "0"});
    cw.row(std::vector<std::string>{"cell", "n0", "n1", "n2"});
    for (int c = 0; c < n_cells_; ++c)
      cw.row(std::vector<std::string>{std::to_string(c), std::to_string(tri_[static_cast<std::size_t>(c)][0]),
                                      std::to_string(tri_[static_cast<std::size_t>(c)][1]),
                                      std::to_string(tri_[static_cast<std::size_t>(c)][2])});
  }
}

std::shared_ptr<const Mesh> Mesh::read_csv(std::istream& vertices_in, std::istream& cells_in) {
  std::string line;
  if (!std::getline(vertices_in, line)) throw Error("Mesh::read_csv: empty vertex file");
  const auto header = csv_split(line);
  std::vector<std::array<double, 2>> verts;
  const bool planar_file = header.size() == 4;
  while (std::getline(vertices_in, line)) {
    if (line.empty()) continue;
    const auto f = csv_split(line);
    if (planar_file)
      verts.push_back({std::stod(f.at(1)), std::stod(f.at(2))});
    else
      verts.push_back({std::stod(f.at(1)), 0.0});
  }
  if (!planar_file) throw Error("Mesh::read_csv: only planar meshes are importable");
  if (!std::getline(cells_in, line)) throw Error("Mesh::read_csv: empty cell file");
  std::vector<std::array<int, 3>> tris;
  while (std::getline(cells_in, line)) {
    if (line.empty()) continue;
    const auto f = csv_split(line);
    tris.push_back({std::stoi(f.at(1)), std::stoi(f.at(2)), std::stoi(f.at(3))});
  }
  return planar(std::move(verts), std::move(tris));
}

}  // namespace qelab
