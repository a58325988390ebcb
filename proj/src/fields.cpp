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
#include "qelab/fields.hpp"

#include <cmath>
#include <limits>

#include "qelab/function.hpp"

namespace qelab {

double ScalarProfile::at_radius(double r) const { return fn(VecN::axis(1, 0, r)); }

ScalarProfile ScalarProfile::constant(double c) {
  ScalarProfile p;
  p.name = "constant";
  p.amplitude = c;
  p.fn = [c](const VecN&) { return c; };
  return p;
}

ScalarProfile ScalarProfile::inverse_radius(double amplitude) {
  ScalarProfile p;
  p.name = "inverse_radius";
  p.amplitude = amplitude;
  p.exponent = -1.0;
  p.fn = [amplitude](const VecN& x) {
    const double r = x.norm();
    return r > 0.0 ? amplitude / r : std::numeric_limits<double>::infinity();
  };
  return p;
}

ScalarProfile ScalarProfile::power_law(double amplitude, double exponent) {
  ScalarProfile p;
  p.name = "power_law";
  p.amplitude = amplitude;
  p.exponent = exponent;
  p.fn = [amplitude, exponent](const VecN& x) {
    const double r = x.norm();
    if (r == 0.0) return exponent >= 0.0 ? (exponent == 0.0 ? amplitude : 0.0)
                                         : std::numeric_limits<double>::infinity();
    return amplitude * std::pow(r, exponent);
  };
  return p;
}

ScalarProfile ScalarProfile::custom(std::function<double(const VecN&)> fn) {
  ScalarProfile p;
  p.name = "custom";
  p.fn = std::move(fn);
  return p;
}

void StructuralEnvelope::validate() const {
  if (!(alpha > 0.0 && beta > alpha)) throw Error("StructuralEnvelope: need 0 < alpha < beta");
  if (!(p > 1.0 && p < static_cast<double>(N))) throw Error("StructuralEnvelope: need 1 < p < N");
  if (!b.fn || !phi.fn) throw Error("StructuralEnvelope: b and phi profiles required");
}

SampledScalarField StructuralEnvelope::sample_b(const Mesh& mesh) const {
  return sample_on_mesh(mesh, [this](const VecN& x) { return b(x); });
}

SampledScalarField StructuralEnvelope::sample_phi(const Mesh& mesh) const {
  return sample_on_mesh(mesh, [this](const VecN& x) { return phi(x); });
}

SampledScalarField StructuralEnvelope::sample_b_for_measure(const Mesh& mesh, int shells) const {
  if (mesh.kind() != Mesh::Kind::radial) return sample_b(mesh);
  const double grading = std::pow(1e-6, 1.0 / static_cast<double>(shells - 1));
  return sample_radial_profile(N, mesh.radius(), shells,
                               [this](double r) { return b.at_radius(r); }, grading);
}

ModelData ModelData::isotropic(int N, double p, double h) {
  ModelData d;
  d.N = N;
  d.p = p;
  d.h_lower = d.h_upper = h;
  d.H = [N, h](const VecN&) { return MatN::identity(N, h); };
  d.B = [N](const VecN&) { return VecN(N); };
  return d;
}

ModelData ModelData::radial(int N, double p, const ScalarProfile& h_profile, double h_lower,
                            double h_upper, const ScalarProfile& b_profile, double b_sign) {
  ModelData d;
  d.N = N;
  d.p = p;
  d.h_lower = h_lower;
  d.h_upper = h_upper;
  d.H = [N, h_profile](const VecN& x) { return MatN::identity(N, h_profile(x)); };
  d.B = [N, p, b_profile, b_sign](const VecN& x) {
    const double r = x.norm();
    const double mag = std::pow(b_profile(x), p - 1.0);
    if (r == 0.0) return VecN(N);
    VecN v(N);
    for (int i = 0; i < N; ++i) v[i] = b_sign * mag * x[i] / r;
    return v;
  };
  return d;
}

VecN eval_model(const ModelData& data, const VecN& x, double u, const VecN& xi) {
  const MatN H = data.H(x);
  VecN Hxi = H.apply(xi);
  const double s = Hxi.dot(xi);
  if (s < -1e-12 * std::max(1.0, xi.dot(xi)))
    throw NonSPDMatrix("eval_model: <H xi, xi> negative");
  VecN out(xi.size());
  if (s > 0.0) {
    const double scale = std::pow(s, 0.5 * (data.p - 2.0));
    out = scale * Hxi;
  }
  if (u != 0.0) {
    const VecN Bx = data.B(x);
    out += std::pow(std::abs(u), data.p - 2.0) * u * Bx;
  }
  return out;
}

QuasilinearField QuasilinearField::model(const ModelData& data, StructuralEnvelope envelope) {
  envelope.validate();
  QuasilinearField f;
  f.kind = FieldKind::model;
  f.envelope = std::move(envelope);
  f.eval = [data](const VecN& x, double u, const VecN& xi) { return eval_model(data, x, u, xi); };
  const double p = data.p;
  f.d_xi = [data, p](const VecN& x, double /*u*/, const VecN& xi) {
    // d/dxi [ s^{(p-2)/2} H xi ] with s = <H xi, xi>:
    //   s^{(p-2)/2} H + (p-2) s^{(p-4)/2} (H xi)(H xi)^T.
    // s is regularized from below inside this linearization only, so the
    // Jacobian stays finite near flat gradients for p < 2 (and nonzero for
    // p > 2); residual evaluations use the exact form.
    const MatN H = data.H(x);
    const VecN Hxi = H.apply(xi);
    const double s = std::max(Hxi.dot(xi), 0.0) + 1e-8 * 1e-8;
    const double s1 = std::pow(s, 0.5 * (p - 2.0));
    const double s2 = (p - 2.0) * std::pow(s, 0.5 * (p - 4.0));
    MatN J(xi.size());
    for (int i = 0; i < xi.size(); ++i)
      for (int j = 0; j < xi.size(); ++j) J(i, j) = s1 * H(i, j) + s2 * Hxi[i] * Hxi[j];
    return J;
  };
  return f;
}

QuasilinearField QuasilinearField::custom(Evaluator eval, StructuralEnvelope envelope) {
  envelope.validate();
  QuasilinearField f;
  f.kind = FieldKind::custom;
  f.eval = std::move(eval);
  f.envelope = std::move(envelope);
  return f;
}

StructuralEnvelope model_envelope(const ModelData& data, const ScalarProfile& b,
                                  const ScalarProfile& phi, double b_inflation) {
  if (!(b_inflation > 1.0)) throw Error("model_envelope: b_inflation > 1 required");
  const double p = data.p;
  const double pc = conjugate_exponent(p);
  // |u <B, xi>| <= (b|u|)^{p-1}|xi| = c^{1-p} (cb|u|)^{p-1}|xi|
  //            <= eps^p/p |xi|^p + (cb|u|)^p   with eps = (p' c^p)^{-1/p'}.
  const double young_cost = std::pow(pc * std::pow(b_inflation, p), 1.0 - p) / p;
  const double alpha_eff = std::pow(data.h_lower, 0.5 * p) - young_cost;
  if (!(alpha_eff > 0.0))
    throw Error("model_envelope: ellipticity too weak to absorb the lower-order term; "
                "increase b_inflation or h_lower");
  const double beta_eff = (p >= 2.0)
                              ? std::pow(data.h_upper, 0.5 * p)
                              : std::pow(data.h_lower, 0.5 * (p - 2.0)) * data.h_upper;
  StructuralEnvelope env;
  env.alpha = alpha_eff;
  env.beta = std::max(beta_eff, alpha_eff * (1.0 + 1e-12));
  env.p = p;
  env.N = data.N;
  const ScalarProfile base_b = b;
  const double c = b_inflation;
  env.b = ScalarProfile::custom([base_b, c](const VecN& x) { return c * base_b(x); });
  env.b.name = base_b.name;
  env.b.amplitude = c * base_b.amplitude;
  env.b.exponent = base_b.exponent;
  env.phi = phi;
  return env;
}

StructuralReport verify_structural(const QuasilinearField& field,
                                   const std::vector<StructuralSample>& samples) {
  if (samples.empty()) throw Error("verify_structural: nonempty sample list required");
  const StructuralEnvelope& env = field.envelope;
  const double p = env.p;
  StructuralReport rep;
  rep.alpha_used = env.alpha;
  rep.beta_used = env.beta;
  rep.beta_effective = env.beta;

  const double slack = 1e-12;
  for (const StructuralSample& s : samples) {
    ++rep.checked;
    const VecN A = field.eval(s.x, s.u, s.xi);
    const double bu = env.b(s.x) * std::abs(s.u);
    const double ph = env.phi(s.x);
    const double xin = s.xi.norm();

    const double coer_lhs = A.dot(s.xi);
    const double coer_rhs = env.alpha * std::pow(xin, p) - std::pow(bu, p) - std::pow(ph, p);
    const double coer_scale = std::abs(coer_lhs) + std::abs(coer_rhs) + 1.0;
    if (coer_lhs < coer_rhs - slack * coer_scale) {
      rep.passed = false;
      rep.violation = "coercivity bound violated";
      rep.violating_sample = s;
      return rep;
    }

    const double grow_lhs = A.norm();
    const double grow_base = std::pow(bu, p - 1.0) + std::pow(ph, p - 1.0);
    const double grow_rhs = env.beta * std::pow(xin, p - 1.0) + grow_base;
    if (grow_lhs > grow_rhs + slack * (grow_lhs + grow_rhs + 1.0)) {
      // Retry with the smallest beta that fits this sample; the report
      // distinguishes "holds with the given beta" from "holds inflated".
      const double need = (xin > 0.0) ? (grow_lhs - grow_base) / std::pow(xin, p - 1.0)
                                      : std::numeric_limits<double>::infinity();
      if (std::isfinite(need)) {
        rep.beta_inflated = true;
        rep.beta_effective = std::max(rep.beta_effective, need * (1.0 + 1e-12));
      } else {
        rep.passed = false;
        rep.violation = "growth bound violated at xi = 0";
        rep.violating_sample = s;
        return rep;
      }
    }

    VecN d = s.xi - s.eta;
    if (d.norm() == 0.0) {
      ++rep.monotonicity_skipped;
      continue;
    }
    const VecN Aeta = field.eval(s.x, s.u, s.eta);
    const double mono = (A - Aeta).dot(d);
    if (!(mono > 0.0)) {
      rep.passed = false;
      rep.violation = "strict monotonicity in xi violated";
      rep.violating_sample = s;
      return rep;
    }
  }
  return rep;
}

double theta(double b_value, double n) {
  if (!(n > 0.0)) throw Error("theta: n > 0 required");
  if (b_value <= n) return 1.0;  // includes b = 0 (limit convention)
  return n / b_value;
}

double theta(const SampledScalarField& b, double n, std::size_t sample_index) {
  return theta(b.values().at(sample_index), n);
}

QuasilinearField truncate_field(const std::shared_ptr<const QuasilinearField>& field, double n) {
  if (!field) throw Error("truncate_field: null base field");
  if (!(n > 0.0)) throw Error("truncate_field: n > 0 required");
  QuasilinearField out;
  out.kind = FieldKind::truncated;
  out.truncation_level = static_cast<int>(n);
  out.base = field;
  const ScalarProfile b = field->envelope.b;
  out.eval = [field, b, n](const VecN& x, double u, const VecN& xi) {
    return field->eval(x, theta(b(x), n) * u, xi);
  };
  if (field->d_xi) {
    out.d_xi = [field, b, n](const VecN& x, double u, const VecN& xi) {
      return field->d_xi(x, theta(b(x), n) * u, xi);
    };
  }
  out.envelope = field->envelope;
  out.envelope.b = ScalarProfile::custom([b, n](const VecN& x) { return std::min(b(x), n); });
  out.envelope.b.name = "truncated(" + b.name + ")";
  return out;
}

TruncationLevelChoice choose_truncation_level(const SampledScalarField& b, double alpha, double p,
                                              const SobolevConstant& S) {
  if (!(alpha > 0.0 && p > 1.0)) throw Error("choose_truncation_level: bad alpha or p");
  const double threshold = std::pow(alpha, 1.0 / p) / S.value;
  const double dist = dist_to_bounded(b, static_cast<double>(S.N), 1e-6);
  if (!(dist < threshold))
    throw DistanceTooLarge(
        "distance condition violated: dist_{L^{N,inf}}(b, L^inf) = " + std::to_string(dist) +
            " >= alpha^{1/p}/S = " + std::to_string(threshold),
        dist, threshold);

  const LorentzIndex weakN = LorentzIndex::weak(static_cast<double>(S.N));
  for (double m = 1.0; m <= 16777216.0; m *= 2.0) {
    SampledScalarField residual =
        b.with_values([&] {
          std::vector<double> v(b.values());
          for (double& y : v) y = y - truncate_scalar(y, m);
          return v;
        }());
    const double rn = lorentz_quasinorm(residual, weakN);
    if (S.value * rn < std::pow(alpha, 1.0 / p))
      return TruncationLevelChoice{static_cast<int>(m), rn, threshold, dist, S};
  }
  throw DistanceTooLarge(
      "distance condition: no truncation level on the doubling schedule satisfies "
      "S*||b - T_m b||_{N,inf} < alpha^{1/p}",
      dist, threshold);
}

}  // namespace qelab
