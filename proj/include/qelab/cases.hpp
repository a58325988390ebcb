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

#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

#include "qelab/obstacle.hpp"

namespace qelab {

/// One measured quantity of a verification case. Values paired with an
/// oracle are asserted at `tolerance` (relative unless absolute_tol);
/// record-only entries never fail the case. A record-only entry marked as a
/// deviation (a proxy outcome recorded instead of asserted) moves the exit
/// status to 2; plain recorded parameters do not.
struct CaseEntry {
  std::string name;
  double computed = 0.0;
  std::optional<double> oracle;
  std::optional<double> tolerance;
  bool absolute_tol = false;
  bool record_only = false;
  bool deviation = false;
  bool pass = true;
  std::string note;

  static CaseEntry checked(std::string name, double computed, double oracle, double tol,
                           bool absolute = false, std::string note = {});
  static CaseEntry threshold(std::string name, double computed, double min_required,
                             std::string note = {});  // pass iff computed >= min_required
  static CaseEntry recorded(std::string name, double computed, std::string note = {},
                            bool deviation = false);
};

struct CaseCurve {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct CaseResult {
  std::string id;
  nlohmann::json parameters() const;
  std::vector<std::pair<std::string, double>> params;
  std::vector<CaseEntry> entries;
  std::vector<CaseCurve> curves;

  bool passed() const;           // every non-record entry holds
  bool has_record_only() const;
  bool has_recorded_deviation() const;
  /// Writes <dir>/<id>/result.json plus one CSV per curve.
  void write(const std::string& dir) const;
  std::string summary() const;
};

/// Distance of B/|x| to L^inf in weak-L^N against the closed form
/// B * omega_N^{1/N}, on a geometrically graded radial sample.
CaseResult dist_radial(double B, int N, int shells = 60000, double rel_tol = 1e-3);

/// Concentrating sequence on the ball of radius 3: gradient p-norm and the
/// lower-order pairing norm are constant in n while the integrand escapes to
/// the origin; both sequences are checked against their scale-invariant
/// values, and the pointwise lower-order term collapses on a fixed annulus.
CaseResult example_concentration(int N, double p, const std::vector<int>& n_list,
                                 int cells = 1 << 14, double rel_tol = 0.02);

/// Drift counterexample on the unit ball (admissible window N/2 < gamma+1 <= N,
/// OutOfRange otherwise): (a) the closed-form adjoint solution
/// v = (|x|^{2-N+gamma}-1)/(2-N+gamma)  (log|x| at gamma = N-2) annihilates
/// the adjoint drift form at rate O(h) away from the origin; (b) the forward
/// problem's discrete norms are recorded across refinements as a blow-up
/// proxy (record-only: nonexistence is not a finite computation).
CaseResult example_nonexistence(double gamma, int N, int refinements = 3, int base_cells = 64,
                                double min_order = 0.9);

/// Resonant right-hand side at the first Dirichlet eigenpair of the ball
/// (radial reduction): the shifted system is singular in the limit (smallest
/// singular value curve recorded), the eigenfunction datum has order-one
/// component against the kernel, a 10% spectral shift restores solvability,
/// and an orthogonalized datum admits a recorded least-squares solution.
CaseResult example_resonance(int N, int refinements = 3, int base_cells = 64);

/// Higher-integrability probe: with datum div(|F|^{p-2}F), F in L^r, and
/// phi in L^r, measures ||grad |u|^{r*/p*}||_p against
/// (||F||_r + ||phi||_r + ||u||_r)^{r*/p*} across refinements; the ratio must
/// stay within ratio_tol of flat. Entry is gated by the tightened distance
/// threshold delta = (alpha^{1/p}/S)*(p*/r*); for r > p* the measurement is
/// repeated along the bootstrap exponent chain and each stage recorded.
CaseResult regularity_probe(double r, const QuasilinearField& field,
                            const std::function<VecN(const VecN&)>& F, const ScalarProfile& phi,
                            const SolveConfig& config,
                            const std::vector<std::shared_ptr<const Mesh>>& meshes,
                            double ratio_tol = 0.10);

}  // namespace qelab
