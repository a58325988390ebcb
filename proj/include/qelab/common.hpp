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
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace qelab {

// Ambient dimensions are small (ball problems, planar meshes); a fixed
// capacity keeps coordinate/vector values off the heap in assembly loops.
inline constexpr int kMaxDim = 8;

/// Small fixed-capacity vector used for coordinates, gradients and vector
/// field values. Size is the active dimension, capacity is kMaxDim.
struct VecN {
  std::array<double, kMaxDim> a{};
  int n = 0;

  VecN() = default;
  explicit VecN(int dim) : n(dim) {
    if (dim < 0 || dim > kMaxDim) throw std::invalid_argument("VecN: bad dim");
  }
  static VecN axis(int dim, int k, double value) {
    VecN v(dim);
    v.a[static_cast<std::size_t>(k)] = value;
    return v;
  }

  int size() const { return n; }
  double& operator[](int i) { return a[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return a[static_cast<std::size_t>(i)]; }

  double dot(const VecN& o) const {
    double s = 0;
    for (int i = 0; i < n; ++i) s += a[static_cast<std::size_t>(i)] * o.a[static_cast<std::size_t>(i)];
    return s;
  }
  double norm() const { return std::sqrt(dot(*this)); }

  VecN& operator+=(const VecN& o) {
    for (int i = 0; i < n; ++i) a[static_cast<std::size_t>(i)] += o.a[static_cast<std::size_t>(i)];
    return *this;
  }
  VecN& operator-=(const VecN& o) {
    for (int i = 0; i < n; ++i) a[static_cast<std::size_t>(i)] -= o.a[static_cast<std::size_t>(i)];
    return *this;
  }
  VecN& operator*=(double s) {
    for (int i = 0; i < n; ++i) a[static_cast<std::size_t>(i)] *= s;
    return *this;
  }
  friend VecN operator+(VecN x, const VecN& y) { return x += y; }
  friend VecN operator-(VecN x, const VecN& y) { return x -= y; }
  friend VecN operator*(double s, VecN x) { return x *= s; }
};

/// Small dense matrix with the same fixed capacity, used for frozen-operator
/// linearizations at quadrature points.
struct MatN {
  std::array<double, kMaxDim * kMaxDim> a{};
  int n = 0;

  MatN() = default;
  explicit MatN(int dim) : n(dim) {}
  static MatN identity(int dim, double scale = 1.0) {
    MatN m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = scale;
    return m;
  }

  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i * kMaxDim + j)]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i * kMaxDim + j)]; }

  VecN apply(const VecN& x) const {
    VecN y(n);
    for (int i = 0; i < n; ++i) {
      double s = 0;
      for (int j = 0; j < n; ++j) s += (*this)(i, j) * x[j];
      y[i] = s;
    }
    return y;
  }
  MatN& operator+=(const MatN& o) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += o.a[i];
    return *this;
  }
  MatN& operator*=(double s) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] *= s;
    return *this;
  }
};

/// Compensated (Kahan) sum. Weight vectors can hold ~10^6 entries and the
/// field invariants are checked at 1e-12 relative, which a naive sum misses.
inline double kahan_sum(const std::vector<double>& xs) {
  double s = 0.0, c = 0.0;
  for (double x : xs) {
    double y = x - c;
    double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s;
}

/// Lebesgue measure of the unit ball in R^N.
inline double unit_ball_measure(int N) {
  if (N < 1) throw std::invalid_argument("unit_ball_measure: N >= 1 required");
  return std::pow(M_PI, 0.5 * N) / std::tgamma(0.5 * N + 1.0);
}

/// Holder conjugate p' = p/(p-1).
inline double conjugate_exponent(double p) { return p / (p - 1.0); }

/// Sobolev exponent p* = Np/(N-p), defined for 1 < p < N.
inline double sobolev_exponent(int N, double p) {
  if (!(p > 1.0 && p < static_cast<double>(N)))
    throw std::invalid_argument("sobolev_exponent: need 1 < p < N");
  return static_cast<double>(N) * p / (static_cast<double>(N) - p);
}

/// sign(y)*min(|y|, k): clips to the band [-k, k] preserving sign.
inline double truncate_scalar(double y, double k) {
  if (y > k) return k;
  if (y < -k) return -k;
  return y;
}

// ---------------------------------------------------------------------------
// Error taxonomy. All failures carry a message; a few carry measured data the
// caller may need for reporting.

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonFiniteNorm : Error { using Error::Error; };
struct ScheduleExhausted : Error {
  double last_value;
  double last_k;
  ScheduleExhausted(const std::string& msg, double value, double k)
      : Error(msg), last_value(value), last_k(k) {}
};
struct MissingOverride : Error { using Error::Error; };
struct NonSPDMatrix : Error { using Error::Error; };
struct MeshMismatch : Error { using Error::Error; };
struct DistanceTooLarge : Error {
  double measured_distance;
  double threshold;
  DistanceTooLarge(const std::string& msg, double measured, double thresh)
      : Error(msg), measured_distance(measured), threshold(thresh) {}
};
struct NewtonStalled : Error { using Error::Error; };
struct NotAdmissible : Error { using Error::Error; };
struct ProjectionStalled : Error { using Error::Error; };
struct OutOfRange : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

}  // namespace qelab
