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
#include "qelab/lorentz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace qelab {

LorentzIndex LorentzIndex::pq(double p, double q) {
  if (!(p > 1.0)) throw Error("LorentzIndex: p > 1 required");
  if (!(q >= 1.0)) throw Error("LorentzIndex: q >= 1 required");
  if (!std::isfinite(q)) throw Error("LorentzIndex: use LorentzIndex::weak for q = infinity");
  return LorentzIndex{p, q, false};
}

LorentzIndex LorentzIndex::weak(double p) {
  if (!(p > 1.0)) throw Error("LorentzIndex: p > 1 required");
  return LorentzIndex{p, 0.0, true};
}

namespace {

// Step representation of the distribution function: ascending distinct
// positive magnitudes `level` and tail measures `tail[j]` = |{|f| >= level[j]}|.
// lambda_f(t) = tail[j] for t in [level[j-1], level[j]), with level[-1] := 0.
struct StepDistribution {
  std::vector<double> level;
  std::vector<double> tail;
};

StepDistribution build_steps(const std::vector<double>& values, const std::vector<double>& weights) {
  std::vector<std::pair<double, double>> mw;
  mw.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double m = std::abs(values[i]);
    if (!std::isfinite(m)) throw NonFiniteNorm("lorentz: non-finite sample value");
    if (m > 0.0) mw.emplace_back(m, weights[i]);
  }
  std::sort(mw.begin(), mw.end());
  StepDistribution sd;
  sd.level.reserve(mw.size());
  sd.tail.reserve(mw.size());
  // Walk descending so tails accumulate; merge duplicates exactly.
  double acc = 0.0, comp = 0.0;
  for (std::size_t k = mw.size(); k-- > 0;) {
    const double y = mw[k].second - comp;
    const double t = acc + y;
    comp = (t - acc) - y;
    acc = t;
    if (k == 0 || mw[k - 1].first != mw[k].first) {
      sd.level.push_back(mw[k].first);
      sd.tail.push_back(acc);
    }
  }
  std::reverse(sd.level.begin(), sd.level.end());
  std::reverse(sd.tail.begin(), sd.tail.end());
  return sd;
}

double weak_norm_from_steps(const StepDistribution& sd, double p) {
  double best = 0.0;
  for (std::size_t j = 0; j < sd.level.size(); ++j)
    best = std::max(best, sd.level[j] * std::pow(sd.tail[j], 1.0 / p));
  return best;
}

// Exact t-integral of p * lambda^{q/p} t^{q-1} over the steps:
// (p/q) * sum_j tail[j]^{q/p} * (level[j]^q - level[j-1]^q).
double finite_q_norm_from_steps(const StepDistribution& sd, double p, double q) {
  std::vector<double> terms(sd.level.size());
  double prev_pow = 0.0;
  for (std::size_t j = 0; j < sd.level.size(); ++j) {
    const double cur_pow = std::pow(sd.level[j], q);
    terms[j] = std::pow(sd.tail[j], q / p) * (cur_pow - prev_pow);
    prev_pow = cur_pow;
  }
  const double s = (p / q) * kahan_sum(terms);
  if (!std::isfinite(s)) throw NonFiniteNorm("lorentz_quasinorm: t-integral not finite");
  return std::pow(s, 1.0 / q);
}

}  // namespace

double distribution_function(const SampledScalarField& f, double t) {
  if (!(t >= 0.0)) throw Error("distribution_function: t >= 0 required");
  std::vector<double> hit;
  hit.reserve(f.size());
  for (std::size_t i = 0; i < f.size(); ++i)
    if (std::abs(f.values()[i]) > t) hit.push_back(f.weights()[i]);
  return hit.empty() ? 0.0 : kahan_sum(hit);
}

double lorentz_quasinorm(const SampledScalarField& f, const LorentzIndex& idx) {
  const StepDistribution sd = build_steps(f.values(), f.weights());
  if (sd.level.empty()) return 0.0;
  return idx.q_infinite ? weak_norm_from_steps(sd, idx.p)
                        : finite_q_norm_from_steps(sd, idx.p, idx.q);
}

double lorentz_quasinorm_quadrature(const SampledScalarField& f, const LorentzIndex& idx,
                                    double rtol, int max_panels) {
  if (idx.q_infinite)
    throw Error("lorentz_quasinorm_quadrature: finite q only");
  const StepDistribution sd = build_steps(f.values(), f.weights());
  if (sd.level.empty()) return 0.0;
  const double p = idx.p, q = idx.q;
  const double t_lo = sd.level.front(), t_hi = sd.level.back();
  // Head [0, t_lo): lambda is constant there, integrate p t^{q-1} exactly.
  const double head = (p / q) * std::pow(sd.tail.front(), q / p) * std::pow(t_lo, q);

  auto lambda_at = [&](double t) {
    // lambda(t) = tail measure at the first level strictly above t.
    const auto it = std::upper_bound(sd.level.begin(), sd.level.end(), t);
    if (it == sd.level.end()) return 0.0;
    return sd.tail[static_cast<std::size_t>(it - sd.level.begin())];
  };
  auto integrand = [&](double t) {
    return p * std::pow(lambda_at(t), q / p) * std::pow(t, q - 1.0);
  };
  auto simpson = [&](int panels) {
    // Log-spaced composite Simpson on [t_lo, t_hi].
    const double la = std::log(t_lo), lb = std::log(t_hi);
    double sum = 0.0;
    for (int i = 0; i < panels; ++i) {
      const double a = std::exp(la + (lb - la) * i / panels);
      const double b = std::exp(la + (lb - la) * (i + 1) / panels);
      const double m = 0.5 * (a + b);
      sum += (b - a) / 6.0 * (integrand(a) + 4.0 * integrand(m) + integrand(b));
    }
    return sum;
  };

  double prev = simpson(16);
  for (int panels = 32; panels <= max_panels; panels *= 2) {
    const double cur = simpson(panels);
    if (std::abs(cur - prev) <= rtol * std::max(std::abs(cur), 1e-300)) {
      prev = cur;
      break;
    }
    prev = cur;
  }
  if (!std::isfinite(prev)) throw NonFiniteNorm("lorentz_quasinorm_quadrature: integral not finite");
  return std::pow(head + prev, 1.0 / q);
}

SampledScalarField truncate(const SampledScalarField& f, double k) {
  if (!(k > 0.0)) throw Error("truncate: k > 0 required");
  return f.map([k](double v) { return truncate_scalar(v, k); });
}

DistToBoundedResult dist_to_bounded_curve(const SampledScalarField& f, double p, double tol) {
  if (!(p > 1.0)) throw Error("dist_to_bounded: p > 1 required");
  if (!(tol > 0.0)) throw Error("dist_to_bounded: tol > 0 required");
  const StepDistribution sd = build_steps(f.values(), f.weights());
  DistToBoundedResult res;
  if (sd.level.empty()) {  // f vanishes on samples
    res.exact_zero = true;
    return res;
  }
  const double maxabs = sd.level.back();

  // ||f - T_k f||_{p,inf} on the shared step scaffold: the residual
  // (|f|-k)_+ has superlevel sets {|f| > t+k}, so its weak norm is
  // max over levels above k of (level - k) * tail^{1/p}.
  auto residual_weak_norm = [&](double k) {
    double best = 0.0;
    for (std::size_t j = sd.level.size(); j-- > 0;) {
      if (sd.level[j] <= k) break;
      best = std::max(best, (sd.level[j] - k) * std::pow(sd.tail[j], 1.0 / p));
    }
    return best;
  };

  double prev = std::numeric_limits<double>::quiet_NaN();
  const double k_cap = 0x1p500;
  for (double k = 1.0; ; k *= 2.0) {
    if (k >= maxabs) {
      res.value = 0.0;
      res.final_k = k;
      res.exact_zero = true;
      res.history.emplace_back(k, 0.0);
      return res;
    }
    const double val = residual_weak_norm(k);
    res.history.emplace_back(k, val);
    if (!std::isnan(prev) && std::abs(val - prev) < tol * std::max(val, std::numeric_limits<double>::min())) {
      res.value = val;
      res.final_k = k;
      return res;
    }
    prev = val;
    if (k > k_cap)
      throw ScheduleExhausted("dist_to_bounded: truncation schedule exhausted before stabilizing",
                              val, k);
  }
}

double dist_to_bounded(const SampledScalarField& f, double p, double tol) {
  return dist_to_bounded_curve(f, p, tol).value;
}

ClosureResult is_in_closure(const SampledScalarField& f, double p, double tol) {
  if (!(p > 1.0)) throw Error("is_in_closure: p > 1 required");
  const StepDistribution sd = build_steps(f.values(), f.weights());
  ClosureResult res;
  if (sd.level.empty()) {
    res.in_closure = true;
    res.inconclusive = false;
    res.tail_value = 0.0;
    return res;
  }
  res.curve.reserve(sd.level.size());
  for (std::size_t j = 0; j < sd.level.size(); ++j) {
    // The curve point at level s_j is the left limit t -> s_j^-, where the
    // superlevel set is {|f| >= s_j}.
    res.curve.push_back({sd.level[j], sd.tail[j], sd.level[j] * std::pow(sd.tail[j], 1.0 / p)});
  }
  res.tail_value = res.curve.back().weak_value;
  // Resolution rule for sampled measures: a top level carrying a bulk share
  // of the measure is a genuinely attained maximum (lambda vanishes beyond
  // it), whereas a top level carried by a vanishing innermost atom marks an
  // unresolved singularity and the left-limit value decides.
  const bool max_attained = sd.tail.back() >= 1e-5 * f.domain_measure();
  res.in_closure = max_attained || res.tail_value < tol;

  // Tail behavior over the last decade of t: flag if the curve is still
  // oscillating upward there, since then the largest resolvable level says
  // little about the limit.
  res.inconclusive = false;
  const double t_last = sd.level.back();
  double running_max_after_rise = 0.0;
  double prev_val = -1.0;
  for (const CurvePoint& cp : res.curve) {
    if (cp.t < 0.1 * t_last) continue;
    if (prev_val >= 0.0 && cp.weak_value > prev_val * (1.0 + 1e-9))
      running_max_after_rise = std::max(running_max_after_rise, cp.weak_value - prev_val);
    prev_val = cp.weak_value;
  }
  if (running_max_after_rise > tol) res.inconclusive = true;
  return res;
}

}  // namespace qelab
