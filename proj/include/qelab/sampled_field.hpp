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
#include <string>
#include <vector>

#include "qelab/common.hpp"

namespace qelab {

/// Scalar function carried on quadrature points with positive weights.
///
/// This is the substrate for every measure-theoretic computation: the
/// points carry coordinates only for provenance and export, all set/measure
/// logic runs on (value, weight) pairs. Immutable after construction.
class SampledScalarField {
 public:
  /// Validates invariants: equal lengths >= 1, strictly positive weights,
  /// and sum(weights) == domain_measure within 1e-12 relative (compensated
  /// summation; a mismatch is a construction error, not a tolerance issue).
  SampledScalarField(int dim, std::vector<double> coords, std::vector<double> values,
                     std::vector<double> weights, double domain_measure);

  int dim() const { return dim_; }
  std::size_t size() const { return values_.size(); }
  double domain_measure() const { return domain_measure_; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& coords() const { return coords_; }
  double coord(std::size_t i, int k) const { return coords_[i * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(k)]; }

  double max_abs_value() const;

  /// Same sample set, new values (weights and coordinates shared).
  SampledScalarField with_values(std::vector<double> values) const;

  /// Pointwise map value -> fn(value), preserving samples.
  SampledScalarField map(const std::function<double(double)>& fn) const;

  /// Weighted integral of |value|^p (direct sum, no rearrangement).
  double integral_abs_pow(double p) const;

  /// CSV rows: coord_0,...,coord_{dim-1},value,weight. Header included.
  void write_csv(std::ostream& out) const;
  static SampledScalarField read_csv(std::istream& in);

 private:
  int dim_;
  std::vector<double> coords_;
  std::vector<double> values_;
  std::vector<double> weights_;
  double domain_measure_;
};

/// Radial sample of a profile f(r) on the N-ball of given radius.
///
/// Shells are geometrically graded toward the origin (ratio `grading` < 1
/// refines inward; 1.0 gives uniform shells). Each shell contributes one
/// sample at its midpoint carrying the exact shell measure
/// omega_N*(b^N - a^N); the innermost shell [0, r_1] is sampled one-sidedly
/// at its outer edge so that no point sits at r = 0 and the cumulative
/// measure below every singular sample is exact.
SampledScalarField sample_radial_profile(int N, double radius, int shells,
                                         const std::function<double(double)>& f,
                                         double grading = 1.0);

}  // namespace qelab
