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

#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

#include "qelab/mesh.hpp"
#include "qelab/sampled_field.hpp"

namespace qelab {

/// P1 finite-element function: one coefficient per mesh node. Members of
/// W^{1,p}_0 carry zero_boundary = true and vanishing boundary coefficients
/// (enforced on construction and preserved by every solver path).
class DiscreteFunction {
 public:
  DiscreteFunction(std::shared_ptr<const Mesh> mesh, std::vector<double> coeffs,
                   bool zero_boundary = true);
  static DiscreteFunction zeros(std::shared_ptr<const Mesh> mesh, bool zero_boundary = true);
  /// Nodal interpolant of a callable (radial: f(r); planar: f(x, y)).
  static DiscreteFunction interpolate_radial(std::shared_ptr<const Mesh> mesh,
                                             const std::function<double(double)>& f,
                                             bool zero_boundary = true);
  static DiscreteFunction interpolate_planar(std::shared_ptr<const Mesh> mesh,
                                             const std::function<double(double, double)>& f,
                                             bool zero_boundary = true);

  const std::shared_ptr<const Mesh>& mesh() const { return mesh_; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  std::vector<double>& coeffs_mut() { return coeffs_; }
  bool zero_boundary() const { return zero_boundary_; }

  /// Re-assert the boundary invariant after coefficient mutation.
  void enforce_boundary();

  double value_at_quad(int q) const;
  /// Gradient at a quadrature point; coord_dim entries.
  VecN gradient_at_quad(int q) const;
  /// Radial only: point evaluation at radius r.
  double value_at_radius(double r) const;
  /// Radial only: derivative on the cell containing r.
  double derivative_at_radius(double r) const;

  void write_csv(std::ostream& out) const;

 private:
  std::shared_ptr<const Mesh> mesh_;
  std::vector<double> coeffs_;
  bool zero_boundary_;
};

/// ||grad u||_{L^p} by cell quadrature.
double norm_w1p(const DiscreteFunction& u, double p);
/// ||u||_{L^p} by cell quadrature.
double lp_norm(const DiscreteFunction& u, double p);
/// W^{1,p} norm of the difference of two functions on the same mesh
/// (gradient part; the spaces here are zero-boundary so this is a norm).
double w1p_distance(const DiscreteFunction& a, const DiscreteFunction& b, double p);

/// Bridge to the measure-theoretic side: |u| (or |grad u|) carried on the
/// mesh quadrature points as a SampledScalarField.
SampledScalarField sample_values(const DiscreteFunction& u);
SampledScalarField sample_gradient_magnitude(const DiscreteFunction& u);
/// Sample an ambient-space callable on the mesh quadrature points.
SampledScalarField sample_on_mesh(const Mesh& mesh, const std::function<double(const VecN&)>& f);

/// Right-hand side functional. Two representations:
///  - nodal load vector L with <Phi, w> = sum_i L_i w_i;
///  - flux field F on quadrature points with <Phi, w> = -int |F|^{p-2} F . grad w
///    (the divergence-form datum Phi = div(|F|^{p-2}F)).
class RhsFunctional {
 public:
  enum class Kind { nodal_load, flux_field };

  RhsFunctional() = default;  // empty until assigned from a factory

  static RhsFunctional from_load(std::shared_ptr<const Mesh> mesh, std::vector<double> load);
  /// Assembles int f w_i for a volume density f given at quadrature points.
  static RhsFunctional from_density(std::shared_ptr<const Mesh> mesh,
                                    const std::function<double(const VecN&)>& f);
  static RhsFunctional constant_load(std::shared_ptr<const Mesh> mesh, double value);
  static RhsFunctional from_flux(std::shared_ptr<const Mesh> mesh,
                                 const std::function<VecN(const VecN&)>& F, double p);
  static RhsFunctional zero(std::shared_ptr<const Mesh> mesh);

  Kind kind() const { return kind_; }
  const std::shared_ptr<const Mesh>& mesh() const { return mesh_; }
  /// <Phi, w_i> for every nodal hat w_i (boundary entries included).
  const std::vector<double>& node_actions() const { return node_actions_; }
  /// <Phi, w> for a discrete function on the same mesh.
  double apply(const DiscreteFunction& w) const;

 private:
  Kind kind_ = Kind::nodal_load;
  std::shared_ptr<const Mesh> mesh_;
  std::vector<double> node_actions_;
};

}  // namespace qelab
