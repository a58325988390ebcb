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
#include "qelab/function.hpp"

#include <cmath>
#include <ostream>

#include "qelab/csv.hpp"

namespace qelab {

DiscreteFunction::DiscreteFunction(std::shared_ptr<const Mesh> mesh, std::vector<double> coeffs,
                                   bool zero_boundary)
    : mesh_(std::move(mesh)), coeffs_(std::move(coeffs)), zero_boundary_(zero_boundary) {
  if (!mesh_) throw Error("DiscreteFunction: null mesh");
  if (static_cast<int>(coeffs_.size()) != mesh_->n_nodes())
    throw MeshMismatch("DiscreteFunction: coefficient count != node count");
  if (zero_boundary_) enforce_boundary();
}

DiscreteFunction DiscreteFunction::zeros(std::shared_ptr<const Mesh> mesh, bool zero_boundary) {
  std::vector<double> c(static_cast<std::size_t>(mesh->n_nodes()), 0.0);
  return DiscreteFunction(std::move(mesh), std::move(c), zero_boundary);
}

DiscreteFunction DiscreteFunction::interpolate_radial(std::shared_ptr<const Mesh> mesh,
                                                      const std::function<double(double)>& f,
                                                      bool zero_boundary) {
  if (mesh->kind() != Mesh::Kind::radial)
    throw MeshMismatch("interpolate_radial: radial mesh required");
  std::vector<double> c(static_cast<std::size_t>(mesh->n_nodes()));
  for (int i = 0; i < mesh->n_nodes(); ++i) c[static_cast<std::size_t>(i)] = f(mesh->node_r()[static_cast<std::size_t>(i)]);
  return DiscreteFunction(std::move(mesh), std::move(c), zero_boundary);
}

DiscreteFunction DiscreteFunction::interpolate_planar(std::shared_ptr<const Mesh> mesh,
                                                      const std::function<double(double, double)>& f,
                                                      bool zero_boundary) {
  if (mesh->kind() != Mesh::Kind::planar)
    throw MeshMismatch("interpolate_planar: planar mesh required");
  std::vector<double> c(static_cast<std::size_t>(mesh->n_nodes()));
  for (int i = 0; i < mesh->n_nodes(); ++i)
    c[static_cast<std::size_t>(i)] = f(mesh->node_xy()[static_cast<std::size_t>(i)][0], mesh->node_xy()[static_cast<std::size_t>(i)][1]);
  return DiscreteFunction(std::move(mesh), std::move(c), zero_boundary);
}

void DiscreteFunction::enforce_boundary() {
  if (!zero_boundary_) return;
  for (int i : mesh_->boundary_nodes()) coeffs_[static_cast<std::size_t>(i)] = 0.0;
}

double DiscreteFunction::value_at_quad(int q) const {
  const int c = mesh_->quad_cell(q);
  const auto nodes = mesh_->cell_nodes(c);
  double v = 0.0;
  for (int a = 0; a < mesh_->nodes_per_cell(); ++a)
    v += coeffs_[static_cast<std::size_t>(nodes[static_cast<std::size_t>(a)])] * mesh_->quad_basis(q, a);
  return v;
}

VecN DiscreteFunction::gradient_at_quad(int q) const {
  const int c = mesh_->quad_cell(q);
  const auto nodes = mesh_->cell_nodes(c);
  VecN g(mesh_->coord_dim());
  for (int a = 0; a < mesh_->nodes_per_cell(); ++a) {
    const double* ga = mesh_->quad_basis_grad(q, a);
    const double u = coeffs_[static_cast<std::size_t>(nodes[static_cast<std::size_t>(a)])];
    for (int k = 0; k < mesh_->coord_dim(); ++k) g[k] += u * ga[k];
  }
  return g;
}

double DiscreteFunction::value_at_radius(double r) const {
  const int c = mesh_->locate_radial_cell(r);
  const double a = mesh_->node_r()[static_cast<std::size_t>(c)];
  const double b = mesh_->node_r()[static_cast<std::size_t>(c) + 1];
  const double s = (r - a) / (b - a);
  return (1.0 - s) * coeffs_[static_cast<std::size_t>(c)] + s * coeffs_[static_cast<std::size_t>(c) + 1];
}

double DiscreteFunction::derivative_at_radius(double r) const {
  const int c = mesh_->locate_radial_cell(r);
  const double a = mesh_->node_r()[static_cast<std::size_t>(c)];
  const double b = mesh_->node_r()[static_cast<std::size_t>(c) + 1];
  return (coeffs_[static_cast<std::size_t>(c) + 1] - coeffs_[static_cast<std::size_t>(c)]) / (b - a);
}

void DiscreteFunction::write_csv(std::ostream& out) const {
  CsvWriter w(out);
  if (mesh_->kind() == Mesh::Kind::radial) {
    w.row(std::vector<std::string>{"r", "value"});
    for (int i = 0; i < mesh_->n_nodes(); ++i)
      w.row(std::vector<double>{mesh_->node_r()[static_cast<std::size_t>(i)], coeffs_[static_cast<std::size_t>(i)]});
  } else {
    w.row(std::vector<std::string>{"x", "y", "value"});
    for (int i = 0; i < mesh_->n_nodes(); ++i)
      w.row(std::vector<double>{mesh_->node_xy()[static_cast<std::size_t>(i)][0],
                                mesh_->node_xy()[static_cast<std::size_t>(i)][1],
                                coeffs_[static_cast<std::size_t>(i)]});
  }
}

double norm_w1p(const DiscreteFunction& u, double p) {
  const Mesh& m = *u.mesh();
  std::vector<double> terms(static_cast<std::size_t>(m.n_quad()));
  for (int q = 0; q < m.n_quad(); ++q)
    terms[static_cast<std::size_t>(q)] = m.quad_weight(q) * std::pow(u.gradient_at_quad(q).norm(), p);
  return std::pow(kahan_sum(terms), 1.0 / p);
}

double lp_norm(const DiscreteFunction& u, double p) {
  const Mesh& m = *u.mesh();
  std::vector<double> terms(static_cast<std::size_t>(m.n_quad()));
  for (int q = 0; q < m.n_quad(); ++q)
    terms[static_cast<std::size_t>(q)] = m.quad_weight(q) * std::pow(std::abs(u.value_at_quad(q)), p);
  return std::pow(kahan_sum(terms), 1.0 / p);
}

double w1p_distance(const DiscreteFunction& a, const DiscreteFunction& b, double p) {
  if (a.mesh() != b.mesh()) throw MeshMismatch("w1p_distance: functions live on different meshes");
  const Mesh& m = *a.mesh();
  std::vector<double> terms(static_cast<std::size_t>(m.n_quad()));
  for (int q = 0; q < m.n_quad(); ++q) {
    const VecN d = a.gradient_at_quad(q) - b.gradient_at_quad(q);
    terms[static_cast<std::size_t>(q)] = m.quad_weight(q) * std::pow(d.norm(), p);
  }
  return std::pow(kahan_sum(terms), 1.0 / p);
}

namespace {

SampledScalarField field_from_quads(const Mesh& m, const std::function<double(int)>& value_of) {
  std::vector<double> coords, values, weights;
  const int cd = m.coord_dim();
  coords.reserve(static_cast<std::size_t>(m.n_quad() * cd));
  for (int q = 0; q < m.n_quad(); ++q) {
    for (int k = 0; k < cd; ++k) coords.push_back(m.quad_coord(q)[k]);
    values.push_back(value_of(q));
    weights.push_back(m.quad_weight(q));
  }
  return SampledScalarField(cd, std::move(coords), std::move(values), std::move(weights),
                            m.domain_measure());
}

}  // namespace

SampledScalarField sample_values(const DiscreteFunction& u) {
  return field_from_quads(*u.mesh(), [&](int q) { return std::abs(u.value_at_quad(q)); });
}

SampledScalarField sample_gradient_magnitude(const DiscreteFunction& u) {
  return field_from_quads(*u.mesh(), [&](int q) { return u.gradient_at_quad(q).norm(); });
}

SampledScalarField sample_on_mesh(const Mesh& mesh, const std::function<double(const VecN&)>& f) {
  return field_from_quads(mesh, [&](int q) { return f(mesh.quad_position(q)); });
}

RhsFunctional RhsFunctional::from_load(std::shared_ptr<const Mesh> mesh, std::vector<double> load) {
  if (static_cast<int>(load.size()) != mesh->n_nodes())
    throw MeshMismatch("RhsFunctional: load length != node count");
  RhsFunctional r;
  r.kind_ = Kind::nodal_load;
  r.mesh_ = std::move(mesh);
  r.node_actions_ = std::move(load);
  return r;
}

RhsFunctional RhsFunctional::from_density(std::shared_ptr<const Mesh> mesh,
                                          const std::function<double(const VecN&)>& f) {
  std::vector<double> act(static_cast<std::size_t>(mesh->n_nodes()), 0.0);
  for (int c = 0; c < mesh->n_cells(); ++c) {
    const auto nodes = mesh->cell_nodes(c);
    for (int q = mesh->quad_begin(c); q < mesh->quad_end(c); ++q) {
      const double fv = f(mesh->quad_position(q));
      for (int a = 0; a < mesh->nodes_per_cell(); ++a)
        act[static_cast<std::size_t>(nodes[static_cast<std::size_t>(a)])] +=
            mesh->quad_weight(q) * fv * mesh->quad_basis(q, a);
    }
  }
  RhsFunctional r;
  r.kind_ = Kind::nodal_load;
  r.mesh_ = std::move(mesh);
  r.node_actions_ = std::move(act);
  return r;
}

RhsFunctional RhsFunctional::constant_load(std::shared_ptr<const Mesh> mesh, double value) {
  return from_density(std::move(mesh), [value](const VecN&) { return value; });
}

RhsFunctional RhsFunctional::from_flux(std::shared_ptr<const Mesh> mesh,
                                       const std::function<VecN(const VecN&)>& F, double p) {
  // <div(|F|^{p-2}F), w> = -int |F|^{p-2} F . grad w
  std::vector<double> act(static_cast<std::size_t>(mesh->n_nodes()), 0.0);
  const int cd = mesh->coord_dim();
  for (int c = 0; c < mesh->n_cells(); ++c) {
    const auto nodes = mesh->cell_nodes(c);
    for (int q = mesh->quad_begin(c); q < mesh->quad_end(c); ++q) {
      VecN Fq = F(mesh->quad_position(q));
      const double mag = Fq.norm();
      const double scale = (mag > 0.0) ? std::pow(mag, p - 2.0) : 0.0;
      for (int a = 0; a < mesh->nodes_per_cell(); ++a) {
        const double* ga = mesh->quad_basis_grad(q, a);
        double dot = 0.0;
        // Radial meshes carry the radial flux component in entry 0.
        for (int k = 0; k < cd; ++k) dot += Fq[k] * ga[k];
        act[static_cast<std::size_t>(nodes[static_cast<std::size_t>(a)])] -=
            mesh->quad_weight(q) * scale * dot;
      }
    }
  }
  RhsFunctional r;
  r.kind_ = Kind::flux_field;
  r.mesh_ = std::move(mesh);
  r.node_actions_ = std::move(act);
  return r;
}

RhsFunctional RhsFunctional::zero(std::shared_ptr<const Mesh> mesh) {
  std::vector<double> z(static_cast<std::size_t>(mesh->n_nodes()), 0.0);
  return from_load(std::move(mesh), std::move(z));
}

double RhsFunctional::apply(const DiscreteFunction& w) const {
  if (w.mesh() != mesh_) throw MeshMismatch("RhsFunctional::apply: mesh mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < node_actions_.size(); ++i) s += node_actions_[i] * w.coeffs()[i];
  return s;
}

}  // namespace qelab
