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

#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "qelab/function.hpp"
#include "test_helpers.hpp"

using namespace qelab;
using qelab::testing::brute_force_weak_norm;
using qelab::testing::random_field;

namespace {

SampledScalarField indicator_field(double set_measure, double rest_measure) {
  return SampledScalarField(1, {0.0, 1.0}, {1.0, 0.0}, {set_measure, rest_measure},
                            set_measure + rest_measure);
}

SampledScalarField inverse_radius_field(int N, double B, int shells = 20000) {
  const double grading = std::pow(1e-6, 1.0 / (shells - 1));
  return sample_radial_profile(N, 1.0, shells, [B](double r) { return B / r; }, grading);
}

}  // namespace

TEST_CASE("distribution function: indicator, empty superlevel, radial profile") {
  const SampledScalarField ind = indicator_field(0.37, 1.0);
  CHECK(distribution_function(ind, 0.5) == doctest::Approx(0.37).epsilon(1e-14));
  CHECK(distribution_function(ind, 1.5) == 0.0);
  CHECK(distribution_function(ind, 0.0) == doctest::Approx(0.37).epsilon(1e-14));

  // |{1/|x| > 2}| on the unit disc is the measure of the ball of radius 1/2.
  const SampledScalarField f = inverse_radius_field(2, 1.0);
  CHECK(distribution_function(f, 2.0) == doctest::Approx(M_PI / 4.0).epsilon(1e-3));
  CHECK(distribution_function(f, 2.0 * f.max_abs_value()) == 0.0);
}

TEST_CASE("distribution function is nonincreasing in t") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ut(0.0, 1.5);
  for (int trial = 0; trial < 200; ++trial) {
    const SampledScalarField f = random_field(rng);
    std::vector<double> ts;
    for (int k = 0; k < 20; ++k) ts.push_back(ut(rng));
    std::sort(ts.begin(), ts.end());
    double prev = distribution_function(f, ts.front());
    for (std::size_t k = 1; k < ts.size(); ++k) {
      const double cur = distribution_function(f, ts[k]);
      CHECK(cur <= prev + 1e-15);
      prev = cur;
    }
  }
}

TEST_CASE("quasinorm: constant field, zero field, q = p reduction") {
  // ||c||_{p,p} = c * m^{1/p} on a domain of measure m.
  const double m = 2.5, c = 3.0, p = 1.7;
  const SampledScalarField f(1, {0.0, 1.0}, {c, c}, {1.0, 1.5}, m);
  CHECK(lorentz_quasinorm(f, LorentzIndex::pq(p, p)) ==
        doctest::Approx(c * std::pow(m, 1.0 / p)).epsilon(1e-13));

  const SampledScalarField z(1, {0.0}, {0.0}, {1.0}, 1.0);
  CHECK(lorentz_quasinorm(z, LorentzIndex::pq(2, 2)) == 0.0);
  CHECK(lorentz_quasinorm(z, LorentzIndex::weak(2)) == 0.0);

  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const SampledScalarField g = random_field(rng);
    const double direct = std::pow(g.integral_abs_pow(p), 1.0 / p);
    CHECK(lorentz_quasinorm(g, LorentzIndex::pq(p, p)) ==
          doctest::Approx(direct).epsilon(1e-6));
  }
}

TEST_CASE("weak quasinorm of 1/|x| matches omega_N^{1/N} and the brute-force sup") {
  for (int N : {2, 3}) {
    const SampledScalarField f = inverse_radius_field(N, 1.0);
    const double expected = std::pow(unit_ball_measure(N), 1.0 / N);
    const double weak = lorentz_quasinorm(f, LorentzIndex::weak(static_cast<double>(N)));
    CHECK(weak == doctest::Approx(expected).epsilon(2e-3));
    CHECK(weak == doctest::Approx(brute_force_weak_norm(f, N)).epsilon(1e-9));
  }
}

TEST_CASE("weak quasinorm equals the brute-force sup on random fields") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const SampledScalarField f = random_field(rng, 40);
    const double p = 1.5 + 2.0 * (trial % 5) / 4.0;
    CHECK(lorentz_quasinorm(f, LorentzIndex::weak(p)) ==
          doctest::Approx(brute_force_weak_norm(f, p)).epsilon(1e-9));
  }
}

TEST_CASE("quadrature cross-check path agrees with exact step summation") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const SampledScalarField f = random_field(rng, 200);
    const LorentzIndex idx = LorentzIndex::pq(2.5, 1.5);
    const double exact = lorentz_quasinorm(f, idx);
    const double quad = lorentz_quasinorm_quadrature(f, idx, 1e-6);
    CHECK(quad == doctest::Approx(exact).epsilon(1e-3));
  }
}

TEST_CASE("quasinorm rejects non-finite samples") {
  const SampledScalarField f(1, {0.0, 1.0}, {std::numeric_limits<double>::infinity(), 1.0},
                             {1.0, 1.0}, 2.0);
  CHECK_THROWS_AS(lorentz_quasinorm(f, LorentzIndex::pq(2, 2)), NonFiniteNorm);
}

TEST_CASE("lorentz index: q = infinity is a distinct state") {
  CHECK_THROWS_AS(LorentzIndex::pq(2.0, std::numeric_limits<double>::infinity()), Error);
  CHECK(LorentzIndex::weak(2.0).q_infinite);
  CHECK_THROWS_AS(LorentzIndex::pq(1.0, 2.0), Error);
  CHECK_THROWS_AS(LorentzIndex::pq(2.0, 0.5), Error);
}

TEST_CASE("truncation: clipping, sign, idempotence") {
  const SampledScalarField f(1, {0.0, 1.0, 2.0}, {5.0, -5.0, 1.5}, {1.0, 1.0, 1.0}, 3.0);
  const SampledScalarField t2 = truncate(f, 2.0);
  CHECK(t2.values()[0] == 2.0);
  CHECK(t2.values()[1] == -2.0);
  CHECK(t2.values()[2] == 1.5);
  // T_{k'} T_k = T_k for k' >= k.
  const SampledScalarField t3 = truncate(t2, 3.0);
  for (std::size_t i = 0; i < t2.size(); ++i) CHECK(t3.values()[i] == t2.values()[i]);
  CHECK_THROWS_AS(truncate(f, 0.0), Error);
}

TEST_CASE("||f - T_k f||_{p,inf} is nonincreasing in k") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const SampledScalarField f = random_field(rng, 60, 8.0);
    double prev = std::numeric_limits<double>::infinity();
    for (double k = 0.25; k < 16.0; k *= 2.0) {
      SampledScalarField residual = f.map([&](double v) { return v - truncate_scalar(v, k); });
      const double val = lorentz_quasinorm(residual, LorentzIndex::weak(2.0));
      CHECK(val <= prev + 1e-14);
      prev = val;
    }
  }
}

TEST_CASE("dist_to_bounded: bounded fields have distance exactly zero") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 50; ++trial) {
    const SampledScalarField f = random_field(rng, 50, 20.0);
    const DistToBoundedResult res = dist_to_bounded_curve(f, 2.0, 1e-10);
    CHECK(res.exact_zero);
    CHECK(res.value == 0.0);
  }
}

TEST_CASE("dist_to_bounded: inverse-radius profile hits B*omega_N^{1/N}") {
  for (auto [B, N] : std::vector<std::pair<double, int>>{{1.0, 2}, {2.0, 3}}) {
    const SampledScalarField f = inverse_radius_field(N, B, 40000);
    const double expected = B * std::pow(unit_ball_measure(N), 1.0 / N);
    CHECK(dist_to_bounded(f, static_cast<double>(N), 1e-5) ==
          doctest::Approx(expected).epsilon(1e-3));
  }
}

TEST_CASE("dist_to_bounded: residual weak norm is flat in the truncation level") {
  // For B/|x| the residual (f - T_m f) has superlevel sets that are balls of
  // radius B/(t+m); the weak norm stays at B*omega_N^{1/N} for every m.
  const int N = 3;
  const double B = 2.0;
  const SampledScalarField f = inverse_radius_field(N, B, 40000);
  const double expected = B * std::pow(unit_ball_measure(N), 1.0 / N);
  for (double m : {1.0, 4.0, 16.0}) {
    SampledScalarField residual = f.map([&](double v) { return v - truncate_scalar(v, m); });
    const double oracle = brute_force_weak_norm(residual, N);
    const double computed = lorentz_quasinorm(residual, LorentzIndex::weak(static_cast<double>(N)));
    CHECK(computed == doctest::Approx(oracle).epsilon(1e-9));
    CHECK(computed == doctest::Approx(expected).epsilon(2e-3));
  }
}

TEST_CASE("dist_to_bounded: homogeneity under scaling") {
  const SampledScalarField f = inverse_radius_field(2, 1.0, 20000);
  const SampledScalarField f2 = f.map([](double v) { return 2.0 * v; });
  const double d1 = dist_to_bounded(f, 2.0, 1e-5);
  const double d2 = dist_to_bounded(f2, 2.0, 1e-5);
  CHECK(d2 == doctest::Approx(2.0 * d1).epsilon(1e-6));
}

TEST_CASE("closure membership: bounded yes, 1/|x| no, 1/|x|^{1/2} yes") {
  std::mt19937_64 rng(31);
  const SampledScalarField bounded = random_field(rng, 50, 5.0);
  CHECK(is_in_closure(bounded, 2.0, 1e-2).in_closure);

  const int N = 2;
  const SampledScalarField hard = inverse_radius_field(N, 1.0);
  const ClosureResult res = is_in_closure(hard, static_cast<double>(N), 1e-2);
  CHECK_FALSE(res.in_closure);
  // The curve plateaus at the distance value omega_N^{1/N}.
  const double plateau = std::pow(unit_ball_measure(N), 1.0 / N);
  CHECK(res.tail_value == doctest::Approx(plateau).epsilon(5e-3));

  const double grading = std::pow(1e-6, 1.0 / 19999.0);
  const SampledScalarField soft = sample_radial_profile(
      N, 1.0, 20000, [](double r) { return 1.0 / std::sqrt(r); }, grading);
  CHECK(is_in_closure(soft, static_cast<double>(N), 1e-2).in_closure);
}

TEST_CASE("sobolev constant: override, missing override, discrete estimate") {
  const SobolevConstant s = sobolev_constant(3, 2.0, nullptr, 1.0);
  CHECK(s.value == 1.0);
  CHECK(s.provenance == SobolevProvenance::user_override);
  CHECK(s.q_used == 2.0);
  CHECK(s.p_star() == doctest::Approx(6.0));

  CHECK_THROWS_AS(sobolev_constant(3, 2.0, nullptr), MissingOverride);

  const auto coarse = Mesh::radial(3, 1.0, 256);
  const auto fine = Mesh::radial(3, 1.0, 512);
  const SobolevConstant sc = sobolev_constant(3, 2.0, coarse);
  const SobolevConstant sf = sobolev_constant(3, 2.0, fine);
  CHECK(sc.provenance == SobolevProvenance::discrete_estimate);
  CHECK(sf.value > 0.0);
  // Refinement stability between the two finest meshes.
  CHECK(std::abs(sf.value - sc.value) <= 0.02 * sf.value);
}

TEST_CASE("sampled field CSV round trip") {
  std::mt19937_64 rng(37);
  const SampledScalarField f = random_field(rng, 20);
  std::stringstream ss;
  f.write_csv(ss);
  const SampledScalarField g = SampledScalarField::read_csv(ss);
  REQUIRE(g.size() == f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    CHECK(g.values()[i] == f.values()[i]);
    CHECK(g.weights()[i] == f.weights()[i]);
  }
}

TEST_CASE("sampled field invariants are construction errors") {
  CHECK_THROWS_AS(SampledScalarField(1, {0.0}, {1.0}, {0.0}, 0.0), Error);          // zero weight
  CHECK_THROWS_AS(SampledScalarField(1, {0.0}, {1.0}, {1.0}, 2.0), Error);          // bad measure
  CHECK_THROWS_AS(SampledScalarField(1, {0.0}, {1.0, 2.0}, {1.0}, 1.0), Error);     // lengths
  CHECK_THROWS_AS(SampledScalarField(1, {}, {}, {}, 1.0), Error);                   // empty
}

TEST_CASE("closure diagnostic flags a rising tail as inconclusive") {
  // Ascending atom values whose tail products keep growing: the largest level
  // carries bulk measure (a genuinely attained maximum), but the rising curve
  // is flagged for inspection.
  const SampledScalarField f(1, {0.0, 1.0, 2.0, 3.0}, {1.0, 2.0, 4.0, 8.0},
                             {1.0, 1.0, 1.0, 1.0}, 4.0);
  const ClosureResult res = is_in_closure(f, 2.0, 1e-2);
  CHECK(res.in_closure);       // bounded with a fat top level
  CHECK(res.inconclusive);     // but the tail never settled
  CHECK(res.curve.size() == 4);
}

TEST_CASE("discrete sobolev estimate dominates any single trial profile") {
  const int N = 3;
  const double p = 2.0;
  const auto mesh = Mesh::radial(N, 1.0, 256);
  const SobolevConstant S = sobolev_constant(N, p, mesh);
  // One-element family: the ratio of a single profile is a lower bound of
  // the sup the estimator returns.
  const DiscreteFunction g =
      DiscreteFunction::interpolate_radial(mesh, [](double r) { return 1.0 - r * r; });
  const double ratio =
      lorentz_quasinorm(sample_values(g), LorentzIndex::pq(sobolev_exponent(N, p), p)) /
      norm_w1p(g, p);
  CHECK(S.value >= ratio - 1e-12);
}

TEST_CASE("second-index ordering: ||f||_{p,r} <= (q/p)^{1/q - 1/r} ||f||_{p,q} for q < r") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 300; ++trial) {
    const SampledScalarField f = random_field(rng, 40, 2.0);
    const double p = 1.5 + (trial % 4) * 0.5;
    const double q = 1.0 + (trial % 3) * 0.5;
    const double r = q + 0.5 + (trial % 2);
    const double lhs = lorentz_quasinorm(f, LorentzIndex::pq(p, r));
    const double rhs = std::pow(q / p, 1.0 / q - 1.0 / r) *
                       lorentz_quasinorm(f, LorentzIndex::pq(p, q));
    CHECK(lhs <= rhs * (1.0 + 1e-12));
  }
}
