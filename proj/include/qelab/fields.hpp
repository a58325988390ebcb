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
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qelab/lorentz.hpp"
#include "qelab/sampled_field.hpp"

namespace qelab {

/// Named scalar coefficient profile, evaluable anywhere in the domain and
/// serializable for configs. Radial forms depend on |x| only.
struct ScalarProfile {
  std::string name;       // "constant" | "inverse_radius" | "power_law" | "custom"
  double amplitude = 0.0;
  double exponent = 0.0;  // power_law: amplitude * |x|^exponent
  std::function<double(const VecN&)> fn;

  double operator()(const VecN& x) const { return fn(x); }
  double at_radius(double r) const;

  static ScalarProfile constant(double c);
  static ScalarProfile inverse_radius(double amplitude);  // amplitude / |x|
  static ScalarProfile power_law(double amplitude, double exponent);
  static ScalarProfile custom(std::function<double(const VecN&)> fn);
};

/// Structural data (alpha, beta, p, N, b, phi) of a quasilinear field:
/// coercivity alpha |xi|^p - (b|u|)^p - phi^p from below, growth
/// beta |xi|^{p-1} + (b|u|)^{p-1} + phi^{p-1} from above, plus strict
/// monotonicity in xi. b and phi are nonnegative coefficient profiles;
/// sampled instances for the measure-side computations are built on demand.
struct StructuralEnvelope {
  double alpha = 0.0;
  double beta = 0.0;
  double p = 2.0;
  int N = 2;
  ScalarProfile b;
  ScalarProfile phi;

  void validate() const;
  SampledScalarField sample_b(const Mesh& mesh) const;
  SampledScalarField sample_phi(const Mesh& mesh) const;
  /// Measure-faithful sampling of b for distance gates: on radial domains the
  /// profile is resampled on geometrically graded shells carrying exact shell
  /// measures (FEM quadrature weights misstate superlevel measures near the
  /// origin); planar domains fall back to the mesh quadrature.
  SampledScalarField sample_b_for_measure(const Mesh& mesh, int shells = 20000) const;
};

/// Coefficient data of the model operator
///   A(x,u,xi) = <H(x) xi, xi>^{(p-2)/2} H(x) xi + B(x) |u|^{p-2} u
/// with H symmetric, <H xi, xi> >= h_lower |xi|^2, |B(x)| <= b(x)^{p-1}.
struct ModelData {
  std::function<MatN(const VecN&)> H;
  std::function<VecN(const VecN&)> B;
  double h_lower = 1.0;  // ellipticity bound of H
  double h_upper = 1.0;  // largest-eigenvalue bound of H
  double p = 2.0;
  int N = 2;

  static ModelData isotropic(int N, double p, double h = 1.0);
  /// H = h(x) I, B = b(x)^{p-1} * direction(x); radial direction by default.
  static ModelData radial(int N, double p, const ScalarProfile& h_profile, double h_lower,
                          double h_upper, const ScalarProfile& b_profile, double b_sign = 1.0);
};

/// A(x,u,xi) of the model operator. At xi = 0 the principal part is 0 for
/// every p (continuous extension of |xi|^{p-2} xi when p < 2). Throws
/// NonSPDMatrix if <H xi, xi> is negative beyond roundoff.
VecN eval_model(const ModelData& data, const VecN& x, double u, const VecN& xi);

enum class FieldKind { model, truncated, custom };

/// Evaluatable Caratheodory vector field with its structural envelope.
/// Immutable; truncated fields share their base immutably.
struct QuasilinearField {
  using Evaluator = std::function<VecN(const VecN& x, double u, const VecN& xi)>;
  using XiJacobian = std::function<MatN(const VecN& x, double u, const VecN& xi)>;

  Evaluator eval;
  XiJacobian d_xi;  // analytic d A / d xi when available; null -> finite differences
  StructuralEnvelope envelope;
  FieldKind kind = FieldKind::custom;
  int truncation_level = 0;                     // truncated fields only
  std::shared_ptr<const QuasilinearField> base; // truncated fields only

  static QuasilinearField model(const ModelData& data, StructuralEnvelope envelope);
  static QuasilinearField custom(Evaluator eval, StructuralEnvelope envelope);
};

/// Structural envelope certified for a model instance: coercivity of the
/// principal part minus a Young absorption of the lower-order term. The
/// absorption inflates b by `b_inflation` (> 1) so the (b|u|)^p coefficient
/// is exactly one; alpha_eff = h_lower^{p/2} - (p' c^p)^{1-p}/p must stay
/// positive. beta_eff is h_upper^{p/2} for p >= 2 and h_lower^{(p-2)/2} h_upper
/// for p < 2.
StructuralEnvelope model_envelope(const ModelData& data, const ScalarProfile& b,
                                  const ScalarProfile& phi, double b_inflation = 2.0);

struct StructuralSample {
  VecN x;
  double u;
  VecN xi;
  VecN eta;
};

struct StructuralReport {
  bool passed = true;
  int checked = 0;
  int monotonicity_skipped = 0;  // samples with xi == eta (vacuous)
  std::string violation;         // description of the first failure
  std::optional<StructuralSample> violating_sample;
  double alpha_used = 0.0;
  double beta_used = 0.0;
  bool beta_inflated = false;    // growth holds only with beta_effective > envelope beta
  double beta_effective = 0.0;
};

/// Checks the three structural inequalities on the given samples; violations
/// are reported, never thrown. The growth check is retried with an inflated
/// beta when the stated one fails, and the report says which held.
StructuralReport verify_structural(const QuasilinearField& field,
                                   const std::vector<StructuralSample>& samples);

/// theta_n = T_n b / b: 1 where b <= n (including b = 0), else n/b.
double theta(double b_value, double n);
double theta(const SampledScalarField& b, double n, std::size_t sample_index);

/// Truncation of the field in its u-slot: A_n(x,u,xi) = A(x, theta_n(x) u, xi),
/// with the envelope's b replaced by T_n b. Evaluators coincide with the base
/// wherever b <= n; n >= max b makes the truncation the identity.
QuasilinearField truncate_field(const std::shared_ptr<const QuasilinearField>& field, double n);

struct TruncationLevelChoice {
  int level;           // smallest doubling level with S*||b - T_m b||_{N,inf} < alpha^{1/p}
  double residual_norm;
  double threshold;    // alpha^{1/p} / S
  double distance;     // measured dist(b, L^inf) in weak-L^N
  SobolevConstant sobolev;
};

/// Chooses the truncation level m on the doubling schedule {1,2,4,...}.
/// Gate: the distance condition dist_{N,inf}(b, L^inf) < alpha^{1/p}/S must
/// hold for the given S; DistanceTooLarge (with the measured distance and
/// threshold) otherwise, and likewise if no level on the schedule satisfies
/// the bound.
TruncationLevelChoice choose_truncation_level(const SampledScalarField& b, double alpha, double p,
                                              const SobolevConstant& S);

}  // namespace qelab
