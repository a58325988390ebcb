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
#include <cmath>
#include <vector>

#include "qelab/function.hpp"
#include "qelab/lorentz.hpp"

namespace qelab {

namespace {

// Radial trial family for the Rayleigh-type ratio ||g||_{p*,p} / ||grad g||_p,
// parameterized on s = r/R in [0, 1]. The power profiles probe boundary
// behavior; the scaled decay profiles concentrate mass near the origin, which
// is where the sup is approached on a ball.
std::vector<std::function<double(double)>> trial_profiles(int N, double p) {
  std::vector<std::function<double(double)>> fam;
  for (double a : {0.5, 1.0, 2.0, 3.0})
    fam.push_back([a](double s) { return 1.0 - std::pow(s, a); });
  fam.push_back([](double s) { return std::cos(0.5 * M_PI * s); });
  const double decay = (static_cast<double>(N) - p) / p;
  const double q = p / (p - 1.0);
  for (double eps : {0.1, 0.3, 1.0}) {
    fam.push_back([=](double s) {
      const double core = std::pow(1.0 + std::pow(s / eps, q), -decay);
      const double at_boundary = std::pow(1.0 + std::pow(1.0 / eps, q), -decay);
      return core - at_boundary;
    });
  }
  return fam;
}

}  // namespace

SobolevConstant sobolev_constant(int N, double p, std::shared_ptr<const Mesh> mesh,
                                 std::optional<double> override_value) {
  if (!(N >= 2)) throw Error("sobolev_constant: N >= 2 required");
  if (!(p > 1.0 && p < static_cast<double>(N))) throw Error("sobolev_constant: need 1 < p < N");
  if (override_value) {
    if (!(*override_value > 0.0)) throw Error("sobolev_constant: override must be positive");
    return SobolevConstant{N, p, *override_value, SobolevProvenance::user_override, p};
  }
  if (!mesh)
    throw MissingOverride("sobolev_constant: no mesh given and no override value supplied");

  const double p_star = sobolev_exponent(N, p);
  const LorentzIndex idx = LorentzIndex::pq(p_star, p);
  const double R = (mesh->kind() == Mesh::Kind::radial) ? mesh->radius() : [&] {
    double r = 0.0;
    for (const auto& xy : mesh->node_xy()) r = std::max(r, std::hypot(xy[0], xy[1]));
    return r;
  }();

  double best = 0.0;
  for (const auto& profile : trial_profiles(N, p)) {
    DiscreteFunction g =
        (mesh->kind() == Mesh::Kind::radial)
            ? DiscreteFunction::interpolate_radial(mesh, [&](double r) { return profile(r / R); })
            : DiscreteFunction::interpolate_planar(
                  mesh, [&](double x, double y) { return profile(std::hypot(x, y) / R); });
    const double grad_norm = norm_w1p(g, p);
    if (!(grad_norm > 0.0)) continue;
    const double lorentz_norm = lorentz_quasinorm(sample_values(g), idx);
    best = std::max(best, lorentz_norm / grad_norm);
  }
  if (!(best > 0.0)) throw Error("sobolev_constant: degenerate trial family");
  return SobolevConstant{N, p, best, SobolevProvenance::discrete_estimate, p};
}

}  // namespace qelab
