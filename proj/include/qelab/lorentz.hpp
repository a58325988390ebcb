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

#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "qelab/sampled_field.hpp"

namespace qelab {

/// Lorentz index pair (p, q). The second index q = infinity is a distinct
/// state, never encoded as a large number.
struct LorentzIndex {
  double p;
  double q;          // meaningful only when !q_infinite
  bool q_infinite;

  static LorentzIndex pq(double p, double q);
  static LorentzIndex weak(double p);  // (p, infinity): the Marcinkiewicz class
};

/// lambda_f(t): measure of the superlevel set {|f| > t} (strict inequality).
/// Nonincreasing in t; zero once t >= max|f|.
double distribution_function(const SampledScalarField& f, double t);

/// Lorentz quasi-norm.
///
/// For finite q:  ||f||_{p,q}^q = p * integral_0^inf lambda_f(t)^{q/p} t^{q-1} dt.
/// lambda_f is a step function of the sorted distinct sample magnitudes, so
/// the t-integral is evaluated exactly by summation over the steps; for q = p
/// this reduces (exactly, layer-cake) to the weighted L^p sum.
/// For q = infinity:  sup_{t>0} t * lambda_f(t)^{1/p}.
///
/// Throws NonFiniteNorm when samples contain non-finite values.
double lorentz_quasinorm(const SampledScalarField& f, const LorentzIndex& idx);

/// Cross-check path for the t-integral: composite Simpson on a log-spaced
/// t-grid, refined until the estimate moves by less than rtol relative.
/// Intentionally ignorant of the step structure; used to validate the exact
/// summation, not as a primary route. Finite q only.
double lorentz_quasinorm_quadrature(const SampledScalarField& f, const LorentzIndex& idx,
                                    double rtol = 1e-7, int max_panels = 1 << 21);

/// Pointwise truncation: value -> sign(value)*min(|value|, k), k > 0.
SampledScalarField truncate(const SampledScalarField& f, double k);

/// One point of a distance/closure diagnostic curve.
struct CurvePoint {
  double t;
  double lambda;       // superlevel measure at (just below) t
  double weak_value;   // t * lambda^{1/p}
};

struct DistToBoundedResult {
  double value = 0.0;
  double final_k = 0.0;
  bool exact_zero = false;  // truncation level reached max|f|: distance is exactly 0
  std::vector<std::pair<double, double>> history;  // (k, ||f - T_k f||_{p,inf})
};

/// Distance from f to L^inf measured in the weak-L^p norm, computed as the
/// stabilized limit of ||f - T_k f||_{p,inf} along a doubling k-schedule.
///
/// The limit estimate is returned once successive schedule values agree
/// within tol (relative); if k reaches max|f| first the residual vanishes
/// identically and the distance is exactly 0. The curve k -> value is
/// nonincreasing. Throws ScheduleExhausted only if the schedule cap is hit
/// without stabilization (unreachable for finite sample values).
DistToBoundedResult dist_to_bounded_curve(const SampledScalarField& f, double p, double tol);
double dist_to_bounded(const SampledScalarField& f, double p, double tol = 1e-6);

struct ClosureResult {
  bool in_closure;
  bool inconclusive;         // tail of the curve is not settling monotonically
  double tail_value;         // t*lambda^{1/p} at the largest resolvable t
  std::vector<CurvePoint> curve;
};

/// Membership of f in the closure of L^inf inside weak-L^p, tested through
/// the vanishing of t * lambda_f(t)^{1/p} as t grows: true iff the curve has
/// dropped below tol at the largest resolvable level. On sampled measures a
/// maximum attained on a bulk measure set is fully resolved (lambda vanishes
/// beyond it, membership holds); a top level carried by a vanishing atom is
/// an unresolved singularity and the left-limit curve value decides.
ClosureResult is_in_closure(const SampledScalarField& f, double p, double tol);

enum class SobolevProvenance { user_override, discrete_estimate };

/// The constant S of the embedding ||g||_{p*,q} <= S ||grad g||_{p,q} on
/// W^{1,p}_0, together with how it was obtained. The discrete estimate is the
/// q = p instance (recorded in q_used); callers that need a different member
/// of the family must override.
struct SobolevConstant {
  int N;
  double p;
  double value;
  SobolevProvenance provenance;
  double q_used;

  double p_star() const { return sobolev_exponent(N, p); }
  double ball_measure() const { return unit_ball_measure(N); }
};

class Mesh;  // discretization module

/// Discrete Sobolev constant: sup of ||g||_{p*,p} / ||grad g||_p over a fixed
/// family of radial trial profiles interpolated on the mesh (a lower bound of
/// the true constant, stable under refinement). With no mesh, the override is
/// mandatory (MissingOverride otherwise); an override always wins and is
/// tagged user_override.
SobolevConstant sobolev_constant(int N, double p, std::shared_ptr<const Mesh> mesh,
                                 std::optional<double> override_value = std::nullopt);

}  // namespace qelab
