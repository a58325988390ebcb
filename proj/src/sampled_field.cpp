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
#include "qelab/sampled_field.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "qelab/csv.hpp"

namespace qelab {

SampledScalarField::SampledScalarField(int dim, std::vector<double> coords,
                                       std::vector<double> values, std::vector<double> weights,
                                       double domain_measure)
    : dim_(dim),
      coords_(std::move(coords)),
      values_(std::move(values)),
      weights_(std::move(weights)),
      domain_measure_(domain_measure) {
  if (dim_ < 1) throw Error("SampledScalarField: dim >= 1 required");
  if (values_.empty()) throw Error("SampledScalarField: at least one sample required");
  if (weights_.size() != values_.size() || coords_.size() != values_.size() * static_cast<std::size_t>(dim_))
    throw Error("SampledScalarField: points, values, weights must have equal length");
  if (!(domain_measure_ > 0.0)) throw Error("SampledScalarField: positive domain measure required");
  for (double w : weights_)
    if (!(w > 0.0)) throw Error("SampledScalarField: weights must be strictly positive");
  const double total = kahan_sum(weights_);
  if (std::abs(total - domain_measure_) > 1e-12 * domain_measure_)
    throw Error("SampledScalarField: weight sum " + std::to_string(total) +
                " does not match domain measure " + std::to_string(domain_measure_));
}

double SampledScalarField::max_abs_value() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

SampledScalarField SampledScalarField::with_values(std::vector<double> values) const {
  if (values.size() != values_.size())
    throw Error("SampledScalarField::with_values: length mismatch");
  return SampledScalarField(dim_, coords_, std::move(values), weights_, domain_measure_);
}

SampledScalarField SampledScalarField::map(const std::function<double(double)>& fn) const {
  std::vector<double> out(values_.size());
  for (std::size_t i = 0; i < values_.size(); ++i) out[i] = fn(values_[i]);
  return with_values(std::move(out));
}

double SampledScalarField::integral_abs_pow(double p) const {
  std::vector<double> terms(values_.size());
  for (std::size_t i = 0; i < values_.size(); ++i)
    terms[i] = weights_[i] * std::pow(std::abs(values_[i]), p);
  return kahan_sum(terms);
}

void SampledScalarField::write_csv(std::ostream& out) const {
  CsvWriter w(out);
  std::vector<std::string> header;
  for (int k = 0; k < dim_; ++k) header.push_back("x" + std::to_string(k));
  header.push_back("value");
  header.push_back("weight");
  w.row(header);
  for (std::size_t i = 0; i < values_.size(); ++i) {
    std::vector<double> row;
    for (int k = 0; k < dim_; ++k) row.push_back(coord(i, k));
    row.push_back(values_[i]);
    row.push_back(weights_[i]);
    w.row(row);
  }
}

SampledScalarField SampledScalarField::read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error("SampledScalarField::read_csv: empty input");
  // Header row decides the coordinate count: columns before "value".
  std::vector<std::string> cols = csv_split(line);
  int dim = 0;
  while (dim < static_cast<int>(cols.size()) && cols[static_cast<std::size_t>(dim)] != "value") ++dim;
  if (dim == 0 || dim + 2 != static_cast<int>(cols.size()))
    throw Error("SampledScalarField::read_csv: expected header x0,...,value,weight");
  std::vector<double> coords, values, weights;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f = csv_split(line);
    if (static_cast<int>(f.size()) != dim + 2)
      throw Error("SampledScalarField::read_csv: bad row: " + line);
    for (int k = 0; k < dim; ++k) coords.push_back(std::stod(f[static_cast<std::size_t>(k)]));
    values.push_back(std::stod(f[static_cast<std::size_t>(dim)]));
    weights.push_back(std::stod(f[static_cast<std::size_t>(dim) + 1]));
  }
  const double measure = kahan_sum(weights);
  return SampledScalarField(dim, std::move(coords), std::move(values), std::move(weights), measure);
}

SampledScalarField sample_radial_profile(int N, double radius, int shells,
                                         const std::function<double(double)>& f, double grading) {
  if (N < 1 || N > kMaxDim) throw Error("sample_radial_profile: unsupported dimension");
  if (shells < 1) throw Error("sample_radial_profile: shells >= 1 required");
  if (!(radius > 0.0)) throw Error("sample_radial_profile: positive radius required");
  if (!(grading > 0.0 && grading <= 1.0)) throw Error("sample_radial_profile: grading in (0,1]");

  // Shell boundaries: geometric toward the origin for grading < 1
  // (r_j = R * grading^{shells-j}), uniform at grading = 1.
  std::vector<double> bounds(static_cast<std::size_t>(shells) + 1);
  bounds[0] = 0.0;
  for (int j = 1; j <= shells; ++j)
    bounds[static_cast<std::size_t>(j)] =
        (grading == 1.0) ? radius * static_cast<double>(j) / shells
                         : radius * std::pow(grading, static_cast<double>(shells - j));
  bounds[static_cast<std::size_t>(shells)] = radius;

  const double omega = unit_ball_measure(N);
  std::vector<double> coords, values, weights;
  coords.reserve(static_cast<std::size_t>(shells));
  for (int j = 0; j < shells; ++j) {
    const double a = bounds[static_cast<std::size_t>(j)];
    const double b = bounds[static_cast<std::size_t>(j) + 1];
    // One-sided point for the innermost shell keeps singular profiles finite.
    const double r = (j == 0) ? b : 0.5 * (a + b);
    const double w = omega * (std::pow(b, N) - std::pow(a, N));
    if (!(w > 0.0)) throw Error("sample_radial_profile: degenerate shell");
    coords.push_back(r);
    values.push_back(f(r));
    weights.push_back(w);
  }
  return SampledScalarField(1, std::move(coords), std::move(values), std::move(weights),
                            omega * std::pow(radius, N));
}

}  // namespace qelab
