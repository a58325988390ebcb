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
#include "qelab/obstacle.hpp"

#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

using namespace qelab;

namespace {

QuasilinearField laplace_like(int N, double p = 2.0) {
  StructuralEnvelope env;
  env.alpha = 0.5;
  env.beta = 2.0;
  env.p = p;
  env.N = N;
  env.b = ScalarProfile::constant(0.0);
  env.phi = ScalarProfile::constant(0.0);
  return QuasilinearField::model(ModelData::isotropic(N, p), env);
}

QuasilinearField singular_model(int N, double p, double B) {
  const ScalarProfile b = ScalarProfile::inverse_radius(B);
  const ModelData data = ModelData::radial(N, p, ScalarProfile::constant(1.0), 1.0, 1.0, b);
  return QuasilinearField::model(data, model_envelope(data, b, ScalarProfile::constant(0.0)));
}

}  // namespace

TEST_CASE("unconstrained obstacle reduces the VI to the equation") {
  const int N = 3;
  const auto mesh = Mesh::radial(N, 1.0, 64);
  const QuasilinearField field = laplace_like(N);
  const RhsFunctional rhs = RhsFunctional::constant_load(mesh, -3.0);
  SolveConfig cfg;
  const Obstacle free = Obstacle::unconstrained(mesh);
  const ViResult vi = vi_frozen_solve(field, DiscreteFunction::zeros(mesh), rhs, free, cfg);
  const FrozenResult eq = frozen_solve(field, DiscreteFunction::zeros(mesh), rhs, cfg);
  for (int i = 0; i < mesh->n_nodes(); ++i)
    CHECK(vi.u.coeffs()[static_cast<std::size_t>(i)] ==
          doctest::Approx(eq.u.coeffs()[static_cast<std::size_t>(i)]).epsilon(1e-12));
}

TEST_CASE("constant obstacle: solution and free boundary match the piecewise oracle") {
  const int N = 3;
  const double psi_level = -0.05;
  const oracles::FreeBoundaryOracle oracle(N, static_cast<double>(N), psi_level);
  REQUIRE(oracle.rho > 0.1);
  REQUIRE(oracle.rho < 0.95);

  std::vector<double> hs, errs, rho_errs;
  SolveConfig cfg;
  for (int cells : {64, 128, 256}) {
    const auto mesh = Mesh::radial(N, 1.0, cells);
    const QuasilinearField field = laplace_like(N);
    const RhsFunctional rhs = RhsFunctional::constant_load(mesh, -static_cast<double>(N));
    const Obstacle obstacle = Obstacle::constant(mesh, psi_level);
    const ViResult res = vi_frozen_solve(field, DiscreteFunction::zeros(mesh), rhs, obstacle, cfg);

    // Admissibility is exact, not approximate.
    for (int i = 0; i < mesh->n_nodes(); ++i)
      CHECK(res.u.coeffs()[static_cast<std::size_t>(i)] >= psi_level);

    // W^{1,2} error against the oracle derivative.
    double err2 = 0.0;
    for (int q = 0; q < mesh->n_quad(); ++q) {
      const double r = mesh->quad_coord(q)[0];
      const double diff = res.u.gradient_at_quad(q)[0] - oracle.derivative(r);
      err2 += mesh->quad_weight(q) * diff * diff;
    }
    // Discrete free boundary: outermost contact node.
    double rho_h = 0.0;
    for (int i = 0; i < mesh->n_nodes(); ++i)
      if (res.u.coeffs()[static_cast<std::size_t>(i)] <= psi_level)
        rho_h = mesh->node_r()[static_cast<std::size_t>(i)];
    hs.push_back(1.0 / cells);
    errs.push_back(std::sqrt(err2));
    rho_errs.push_back(std::abs(rho_h - oracle.rho));
    CHECK(rho_errs.back() <= 2.0 / cells);
  }
  const double order = std::log(errs[0] / errs[2]) / std::log(hs[0] / hs[2]);
  CHECK(order >= 0.9);
}

TEST_CASE("obstacle equal to the unconstrained solution is touched everywhere") {
  const int N = 3;
  const auto mesh = Mesh::radial(N, 1.0, 64);
  const QuasilinearField field = laplace_like(N);
  const RhsFunctional rhs = RhsFunctional::constant_load(mesh, -3.0);
  SolveConfig cfg;
  const FrozenResult eq = frozen_solve(field, DiscreteFunction::zeros(mesh), rhs, cfg);
  // The unconstrained solution is nonpositive under a downward load, so it is
  // a legitimate obstacle; the VI solution must sit on it.
  Obstacle obstacle(mesh, eq.u.coeffs());
  const ViResult res = vi_frozen_solve(field, DiscreteFunction::zeros(mesh), rhs, obstacle, cfg);
  for (int i = 0; i < mesh->n_nodes(); ++i)
    CHECK(res.u.coeffs()[static_cast<std::size_t>(i)] ==
          doctest::Approx(eq.u.coeffs()[static_cast<std::size_t>(i)]).epsilon(1e-9));
}

TEST_CASE("complementarity slacks: solution probes, interior tightness, self-probe") {
  std::mt19937_64 rng(401);
  const int N = 3;
  const auto mesh = Mesh::radial(N, 1.0, 96);
  const QuasilinearField field = laplace_like(N);
  const RhsFunctional rhs = RhsFunctional::constant_load(mesh, -static_cast<double>(N));
  SolveConfig cfg;

  SUBCASE("VI solution: min slack above -vi_tol, arctan family included") {
    const Obstacle obstacle = Obstacle::constant(mesh, -0.05);
    const ViResult res = vi_frozen_solve(field, DiscreteFunction::zeros(mesh), rhs, obstacle, cfg);
    const ComplementarityReport rep =
        complementarity_residual(res.u, obstacle, field, rhs, {}, 5);
    CHECK(rep.min_normalized >= -1e-8);
    CHECK(rep.contact_nodes > 0);
    CHECK(rep.contact_measure > 0.0);
    bool has_arctan = false;
    for (const ProbeSlack& s : rep.slacks)
      if (s.label.rfind("arctan", 0) == 0) has_arctan = true;
    CHECK(has_arctan);
  }

  SUBCASE("strictly interior solution: slack tight in both directions") {
    const Obstacle obstacle = Obstacle::constant(mesh, -10.0);  // never touched
    const ViResult res = vi_frozen_solve(field, DiscreteFunction::zeros(mesh), rhs, obstacle, cfg);
    CHECK(res.stats.contact_nodes == 0);
    // +/- perturbation probes around an interior solution bound the action
    // from both sides.
    std::uniform_real_distribution<double> uc(-1.0, 1.0);
    for (int k = 0; k < 10; ++k) {
      DiscreteFunction up = res.u;
      DiscreteFunction dn = res.u;
      for (int i = 0; i < mesh->n_nodes(); ++i) {
        const double d = 1e-2 * uc(rng);
        up.coeffs_mut()[static_cast<std::size_t>(i)] += d;
        dn.coeffs_mut()[static_cast<std::size_t>(i)] -= d;
      }
      up.enforce_boundary();
      dn.enforce_boundary();
      const ComplementarityReport rep =
          complementarity_residual(res.u, obstacle, field, rhs, {up, dn}, 7, 0);
      CHECK(rep.slacks[0].slack + rep.slacks[1].slack ==
            doctest::Approx(0.0).epsilon(1e-20));  // exact cancellation of +/- probes
      CHECK(std::abs(rep.slacks[0].normalized) <= 10.0 * cfg.newton_tol);
    }
  }

  SUBCASE("probe w = u has slack exactly zero") {
    const Obstacle obstacle = Obstacle::constant(mesh, -0.05);
    const ViResult res = vi_frozen_solve(field, DiscreteFunction::zeros(mesh), rhs, obstacle, cfg);
    const ComplementarityReport rep =
        complementarity_residual(res.u, obstacle, field, rhs, {res.u}, 9, 0);
    CHECK(rep.slacks[0].slack == 0.0);
  }

  SUBCASE("inadmissible caller probes are rejected") {
    const Obstacle obstacle = Obstacle::constant(mesh, -0.05);
    const ViResult res = vi_frozen_solve(field, DiscreteFunction::zeros(mesh), rhs, obstacle, cfg);
    DiscreteFunction bad = res.u;
    bad.coeffs_mut()[1] = -1.0;  // below the obstacle
    CHECK_THROWS_AS(complementarity_residual(res.u, obstacle, field, rhs, {bad}, 11, 0),
                    NotAdmissible);
  }
}

TEST_CASE("contact sets nest as the obstacle rises") {
  const int N = 3;
  const auto mesh = Mesh::radial(N, 1.0, 128);
  const QuasilinearField field = laplace_like(N);
  const RhsFunctional rhs = RhsFunctional::constant_load(mesh, -static_cast<double>(N));
  SolveConfig cfg;
  std::vector<std::vector<int>> contacts;
  for (double level : {-0.3, -0.2, -0.1, -0.05}) {
    const Obstacle obstacle = Obstacle::constant(mesh, level);
    const ViResult res = vi_frozen_solve(field, DiscreteFunction::zeros(mesh), rhs, obstacle, cfg);
    std::vector<int> contact;
    for (int i = 0; i < mesh->n_nodes(); ++i)
      if (res.u.coeffs()[static_cast<std::size_t>(i)] <= level) contact.push_back(i);
    contacts.push_back(std::move(contact));
  }
  for (std::size_t k = 1; k < contacts.size(); ++k) {
    // Inclusion up to discrete effects on at most 2 cells.
    int missing = 0;
    for (int i : contacts[k - 1])
      if (std::find(contacts[k].begin(), contacts[k].end(), i) == contacts[k].end()) ++missing;
    CHECK(missing <= 2);
    CHECK(contacts[k].size() >= contacts[k - 1].size());
  }
}

TEST_CASE("obstacle construction rules") {
  const auto mesh = Mesh::radial(3, 1.0, 8);
  std::vector<double> pos(static_cast<std::size_t>(mesh->n_nodes()), 0.1);
  CHECK_THROWS_AS(Obstacle(mesh, pos), NotAdmissible);  // psi must be <= 0
  const Obstacle free = Obstacle::unconstrained(mesh);
  CHECK(free.is_unconstrained());
  CHECK(free.admissible(DiscreteFunction::zeros(mesh)));
  // The witness certifies a nonempty admissible set.
  const Obstacle c = Obstacle::constant(mesh, -0.3);
  CHECK(c.admissible(c.witness()));
}

TEST_CASE("obstacle shift: identity, boundary violation, add-back invariance") {
  const int N = 3;
  const auto mesh = Mesh::radial(N, 1.0, 96);
  const QuasilinearField field = laplace_like(N);
  const RhsFunctional rhs = RhsFunctional::constant_load(mesh, -static_cast<double>(N));
  SolveConfig cfg;
  const std::vector<double> psi_raw(static_cast<std::size_t>(mesh->n_nodes()), -0.05);

  SUBCASE("identity shift with g = 0") {
    auto [shifted, obstacle] = shift_obstacle(field, psi_raw, DiscreteFunction::zeros(mesh));
    for (double v : obstacle.psi()) CHECK(v == -0.05);
    const VecN x = VecN::axis(N, 0, 0.4);
    VecN xi(N);
    xi[1] = 0.7;
    const VecN a0 = field.eval(x, 1.3, xi);
    const VecN a1 = shifted.eval(x, 1.3, xi);
    for (int k = 0; k < N; ++k) CHECK(a1[k] == doctest::Approx(a0[k]).epsilon(1e-14));
  }

  SUBCASE("g outside W^{1,p}_0 is rejected") {
    std::vector<double> c(static_cast<std::size_t>(mesh->n_nodes()), 0.2);
    const DiscreteFunction g(mesh, std::move(c), /*zero_boundary=*/false);
    CHECK_THROWS_AS(shift_obstacle(field, psi_raw, g), NotAdmissible);
  }

  SUBCASE("g below the obstacle is rejected") {
    std::vector<double> raised(psi_raw);
    raised[2] = 0.0;  // psi above g = 0 at one node is fine; push psi above 0.1
    std::vector<double> c(static_cast<std::size_t>(mesh->n_nodes()), 0.0);
    c[2] = -0.1;
    DiscreteFunction g(mesh, std::move(c));
    raised[2] = -0.05;
    CHECK_THROWS_AS(shift_obstacle(field, raised, g), NotAdmissible);
  }

  SUBCASE("shifted solve plus add-back equals the direct solve") {
    const DiscreteFunction g = DiscreteFunction::interpolate_radial(
        mesh, [](double r) { return 0.1 * (1.0 - r * r); });
    auto [shifted, obstacle] = shift_obstacle(field, psi_raw, g);
    const ViResult tilde =
        vi_frozen_solve(shifted, DiscreteFunction::zeros(mesh), rhs, obstacle, cfg);
    DiscreteFunction back = tilde.u;
    for (int i = 0; i < mesh->n_nodes(); ++i)
      back.coeffs_mut()[static_cast<std::size_t>(i)] += g.coeffs()[static_cast<std::size_t>(i)];

    const Obstacle direct_ob(mesh, psi_raw);
    const ViResult direct =
        vi_frozen_solve(field, DiscreteFunction::zeros(mesh), rhs, direct_ob, cfg);
    CHECK(w1p_distance(back, direct.u, 2.0) <= 1e-7);
  }
}

TEST_CASE("truncated obstacle scheme: reduction, zero datum, singular coefficient") {
  const int N = 3;
  const auto mesh = Mesh::radial(N, 1.0, 96);
  SolveConfig cfg;

  SUBCASE("psi = -inf reproduces the equation scheme") {
    const QuasilinearField field = singular_model(N, 2.0, 0.05);
    const RhsFunctional rhs = RhsFunctional::constant_load(mesh, 1.0);
    const FixedPointResult vi =
        vi_truncation_scheme(field, rhs, Obstacle::unconstrained(mesh), cfg);
    const FixedPointResult eq = truncation_continuation(field, rhs, cfg);
    CHECK(w1p_distance(vi.u, eq.u, 2.0) <= 10.0 * cfg.newton_tol);
  }

  SUBCASE("zero datum and nonpositive obstacle give the zero solution") {
    const QuasilinearField field = singular_model(N, 2.0, 0.05);
    const RhsFunctional rhs = RhsFunctional::zero(mesh);
    const FixedPointResult res =
        vi_truncation_scheme(field, rhs, Obstacle::constant(mesh, -0.25), cfg);
    CHECK(norm_w1p(res.u, 2.0) <= 1e-12);
    CHECK(res.report.converged);
  }

  SUBCASE("singular coefficient with contact: VI residual certified by probes") {
    const QuasilinearField field = singular_model(N, 2.0, 0.1);
    const RhsFunctional rhs = RhsFunctional::constant_load(mesh, -static_cast<double>(N));
    const Obstacle obstacle = Obstacle::constant(mesh, -0.05);
    const FixedPointResult res = vi_truncation_scheme(field, rhs, obstacle, cfg);
    CHECK(res.report.converged);
    CHECK(obstacle.admissible(res.u));
    const ComplementarityReport rep =
        complementarity_residual(res.u, obstacle, field, rhs, {}, 13, 50);
    CHECK(rep.min_normalized >= -1e-8);
  }
}
