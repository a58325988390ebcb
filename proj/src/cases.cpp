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
#include "qelab/cases.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>

#include "qelab/csv.hpp"

namespace qelab {

CaseEntry CaseEntry::checked(std::string name, double computed, double oracle, double tol,
                             bool absolute, std::string note) {
  CaseEntry e;
  e.name = std::move(name);
  e.computed = computed;
  e.oracle = oracle;
  e.tolerance = tol;
  e.absolute_tol = absolute;
  e.note = std::move(note);
  const double err = std::abs(computed - oracle);
  e.pass = absolute ? err <= tol : err <= tol * std::max(std::abs(oracle), 1e-300);
  return e;
}

CaseEntry CaseEntry::threshold(std::string name, double computed, double min_required,
                               std::string note) {
  CaseEntry e;
  e.name = std::move(name);
  e.computed = computed;
  e.oracle = min_required;
  e.note = std::move(note);
  e.pass = computed >= min_required;
  return e;
}

CaseEntry CaseEntry::recorded(std::string name, double computed, std::string note,
                              bool deviation) {
  CaseEntry e;
  e.name = std::move(name);
  e.computed = computed;
  e.record_only = true;
  e.deviation = deviation;
  e.note = std::move(note);
  return e;
}

bool CaseResult::passed() const {
  for (const CaseEntry& e : entries)
    if (!e.record_only && !e.pass) return false;
  return true;
}

bool CaseResult::has_record_only() const {
  for (const CaseEntry& e : entries)
    if (e.record_only) return true;
  return false;
}

bool CaseResult::has_recorded_deviation() const {
  for (const CaseEntry& e : entries)
    if (e.record_only && e.deviation) return true;
  return false;
}

nlohmann::json CaseResult::parameters() const {
  nlohmann::json j;
  for (const auto& [k, v] : params) j[k] = v;
  return j;
}

void CaseResult::write(const std::string& dir) const {
  namespace fs = std::filesystem;
  const fs::path root = fs::path(dir) / id;
  fs::create_directories(root);
  nlohmann::json j;
  j["case"] = id;
  j["parameters"] = parameters();
  j["passed"] = passed();
  j["entries"] = nlohmann::json::array();
  for (const CaseEntry& e : entries) {
    nlohmann::json je;
    je["name"] = e.name;
    je["computed"] = e.computed;
    if (e.oracle) je["oracle"] = *e.oracle;
    if (e.tolerance) je["tolerance"] = *e.tolerance;
    je["absolute_tol"] = e.absolute_tol;
    je["record_only"] = e.record_only;
    je["deviation"] = e.deviation;
    je["pass"] = e.pass;
    if (!e.note.empty()) je["note"] = e.note;
    j["entries"].push_back(std::move(je));
  }
  j["curves"] = nlohmann::json::array();
  for (const CaseCurve& c : curves) {
    const std::string fname = c.name + ".csv";
    j["curves"].push_back(fname);
    std::ofstream out(root / fname, std::ios::binary);
    CsvWriter w(out);
    w.row(c.columns);
    for (const auto& row : c.rows) w.row(row);
  }
  std::ofstream out(root / "result.json", std::ios::binary);
  out << j.dump(2) << '\n';
}

std::string CaseResult::summary() const {
  std::string s = id + ": " + (passed() ? "pass" : "FAIL");
  int records = 0, checks = 0;
  for (const CaseEntry& e : entries) (e.record_only ? records : checks)++;
  s += " (" + std::to_string(checks) + " checks, " + std::to_string(records) + " recorded)";
  return s;
}

namespace {

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int depth = 24) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  std::function<double(double, double, double, double, double, double, int)> rec =
      [&](double lo, double hi, double flo, double fhi, double fmid, double acc, int d) -> double {
    const double mid = 0.5 * (lo + hi);
    const double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
    const double flm = f(lm), frm = f(rm);
    const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
    const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
    if (d <= 0 || std::abs(left + right - acc) < 15.0 * tol)
      return left + right + (left + right - acc) / 15.0;
    return rec(lo, mid, flo, fmid, flm, left, d - 1) + rec(mid, hi, fmid, fhi, frm, right, d - 1);
  };
  return rec(a, b, fa, fb, fm, whole, depth);
}

// Least-squares slope of log(err) against log(h).
double fit_order(const std::vector<double>& h, const std::vector<double>& err) {
  const std::size_t n = h.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log(h[i]), y = std::log(std::max(err[i], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (static_cast<double>(n) * sxy - sx * sy) / (static_cast<double>(n) * sxx - sx * sx);
}

}  // namespace

CaseResult dist_radial(double B, int N, int shells, double rel_tol) {
  if (!(B > 0.0)) throw Error("dist_radial: B > 0 required");
  CaseResult cr;
  cr.id = "dist_radial_B" + CsvWriter::format(B) + "_N" + std::to_string(N);
  cr.params = {{"B", B}, {"N", static_cast<double>(N)}, {"shells", static_cast<double>(shells)}};

  // Graded shells reach r ~ 1e-6 so the truncation schedule stabilizes well
  // before the sample maximum; the grading keeps relative shell width (and
  // with it the measure bias of the weak norm) well under rel_tol.
  const double grading = std::pow(1e-6, 1.0 / static_cast<double>(shells - 1));
  const SampledScalarField f =
      sample_radial_profile(N, 1.0, shells, [B](double r) { return B / r; }, grading);
  const DistToBoundedResult res = dist_to_bounded_curve(f, static_cast<double>(N), 1e-5);
  const double oracle = B * std::pow(unit_ball_measure(N), 1.0 / static_cast<double>(N));
  cr.entries.push_back(
      CaseEntry::checked("dist_to_bounded", res.value, oracle, rel_tol, false,
                         "closed form B*omega_N^{1/N} for the inverse-radius profile"));

  CaseCurve curve;
  curve.name = "truncation_schedule";
  curve.columns = {"k", "weak_norm_of_residual"};
  for (const auto& [k, v] : res.history) curve.rows.push_back({k, v});
  cr.curves.push_back(std::move(curve));
  return cr;
}

CaseResult example_concentration(int N, double p, const std::vector<int>& n_list, int cells,
                                 double rel_tol) {
  if (!(p > 1.0 && p < static_cast<double>(N)))
    throw OutOfRange("example_concentration: need 1 < p < N");
  CaseResult cr;
  cr.id = "concentration_N" + std::to_string(N) + "_p" + CsvWriter::format(p);
  cr.params = {{"N", static_cast<double>(N)}, {"p", p}, {"cells", static_cast<double>(cells)}};

  const double gamma = 1.0 - static_cast<double>(N) / p;  // negative
  const double omega = unit_ball_measure(N);
  const double two_g = std::pow(2.0, gamma);
  auto u1 = [=](double r) {
    if (r < 1.0) return 1.0 - two_g;
    if (r < 2.0) return std::pow(r, gamma) - two_g;
    return 0.0;
  };

  // Scale-invariant reference values: the gradient energy from the closed
  // form, the lower-order pairing from 1D quadrature of the n = 1 profile.
  const double grad_oracle = std::pow(std::abs(gamma), p) * N * omega * std::log(2.0);
  const double lower_core =
      std::pow(1.0 - two_g, p) / (static_cast<double>(N) - p) +
      adaptive_simpson(
          [=](double r) {
            return std::pow(r, static_cast<double>(N) - p - 1.0) *
                   std::pow(std::pow(r, gamma) - two_g, p);
          },
          1.0, 2.0, 1e-12);
  const double lower_oracle = N * omega * lower_core;

  const auto mesh = Mesh::radial(N, 3.0, cells);
  CaseCurve curve;
  curve.name = "norms_vs_n";
  curve.columns = {"n", "grad_norm_p_pow", "lower_norm_p_pow", "annulus_sup"};

  std::vector<double> grads, lowers;
  double annulus_sup_n1 = 0.0, annulus_sup_last = 0.0;
  for (int n : n_list) {
    const double nf = static_cast<double>(n);
    auto un = [=](double r) { return std::pow(nf, -gamma) * u1(nf * r); };
    const DiscreteFunction uh = DiscreteFunction::interpolate_radial(mesh, un);
    const double grad_pow = std::pow(norm_w1p(uh, p), p);

    // (b|u_n|)^p with b = 1/|x|, integrated on the mesh quadrature.
    double lower_pow = 0.0;
    double annulus_sup = 0.0;
    for (int q = 0; q < mesh->n_quad(); ++q) {
      const double r = mesh->quad_coord(q)[0];
      const double t = std::abs(un(r)) / r;
      lower_pow += mesh->quad_weight(q) * std::pow(t, p);
      if (r >= 1.0 && r <= 2.0) annulus_sup = std::max(annulus_sup, std::pow(t, p - 1.0));
    }
    grads.push_back(grad_pow);
    lowers.push_back(lower_pow);
    if (n == n_list.front()) annulus_sup_n1 = annulus_sup;
    annulus_sup_last = annulus_sup;
    curve.rows.push_back({nf, grad_pow, lower_pow, annulus_sup});

    cr.entries.push_back(CaseEntry::checked("grad_norm_p_pow_n" + std::to_string(n), grad_pow,
                                            grad_oracle, rel_tol, false,
                                            "|gamma|^p N omega_N log 2"));
    cr.entries.push_back(CaseEntry::checked("lower_norm_p_pow_n" + std::to_string(n), lower_pow,
                                            lower_oracle, rel_tol, false,
                                            "1D quadrature of the n-independent profile"));
  }

  auto spread = [](const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return (*hi - *lo) / std::max(*hi, 1e-300);
  };
  cr.entries.push_back(CaseEntry::checked("grad_norm_constancy_spread", spread(grads), 0.0,
                                          rel_tol, true, "max relative spread across n"));
  cr.entries.push_back(CaseEntry::checked("lower_norm_constancy_spread", spread(lowers), 0.0,
                                          rel_tol, true));
  if (n_list.size() >= 2) {
    cr.entries.push_back(CaseEntry::checked(
        "annulus_sup_collapse", annulus_sup_last, 0.0,
        std::max(1e-2 * annulus_sup_n1, 1e-300), true,
        "sup over 1<=|x|<=2 of (b|u_n|)^{p-1} at the largest n vs 1% of the n=1 value"));
  }
  cr.curves.push_back(std::move(curve));
  return cr;
}

CaseResult example_nonexistence(double gamma, int N, int refinements, int base_cells,
                                double min_order) {
  if (!(static_cast<double>(N) / 2.0 < gamma + 1.0 && gamma + 1.0 <= static_cast<double>(N)))
    throw OutOfRange("example_nonexistence: gamma outside the admissible window N/2 < gamma+1 <= N");
  CaseResult cr;
  cr.id = "nonexistence_N" + std::to_string(N) + "_gamma" + CsvWriter::format(gamma);
  cr.params = {{"gamma", gamma},
               {"N", static_cast<double>(N)},
               {"refinements", static_cast<double>(refinements)}};

  const double expo = 2.0 - static_cast<double>(N) + gamma;
  auto v_exact = [=](double r) {
    if (gamma == static_cast<double>(N) - 2.0) return std::log(r);
    return (std::pow(r, expo) - 1.0) / expo;
  };

  CaseCurve adj_curve;
  adj_curve.name = "adjoint_residual";
  adj_curve.columns = {"h", "normalized_residual_max"};
  CaseCurve fwd_curve;
  fwd_curve.name = "forward_norm";
  fwd_curve.columns = {"h", "w12_norm", "growth_factor"};

  std::vector<double> hs, residuals;
  std::vector<double> fwd_norms;
  for (int j = 0; j < refinements; ++j) {
    const int cells = base_cells << j;
    const auto mesh = Mesh::radial(N, 1.0, cells);
    const double h = 1.0 / static_cast<double>(cells);

    auto drift = [gamma, N](const VecN& x) {
      const double r2 = x.dot(x);
      VecN d(N);
      if (r2 > 0.0)
        for (int k = 0; k < N; ++k) d[k] = gamma * x[k] / r2;
      return d;
    };

    // (a) adjoint consistency of the closed-form solution: the interpolant of
    // v annihilates int grad v . grad w + gamma int (x/|x|^2 . grad v) w up to
    // interpolation error; measured nodally, normalized by node measure,
    // away from the origin (r >= 0.1).
    std::vector<double> vc(static_cast<std::size_t>(mesh->n_nodes()));
    for (int i = 0; i < mesh->n_nodes(); ++i) {
      const double r = mesh->node_r()[static_cast<std::size_t>(i)];
      vc[static_cast<std::size_t>(i)] = (i == 0) ? v_exact(mesh->node_r()[1]) : v_exact(r);
    }
    const DiscreteFunction vin(mesh, std::move(vc), /*zero_boundary=*/true);
    Eigen::SparseMatrix<double> A_adj = assemble_stiffness(*mesh);
    A_adj += assemble_drift(*mesh, drift);
    Eigen::VectorXd Rv = A_adj * Eigen::Map<const Eigen::VectorXd>(
                                     vin.coeffs().data(), static_cast<Eigen::Index>(vin.coeffs().size()));
    const std::vector<double> lumped = RhsFunctional::constant_load(mesh, 1.0).node_actions();
    double res_max = 0.0;
    for (int i = 1; i < mesh->n_nodes() - 1; ++i) {
      if (mesh->node_r()[static_cast<std::size_t>(i)] < 0.1) continue;
      res_max = std::max(res_max, std::abs(Rv[i]) / lumped[static_cast<std::size_t>(i)]);
    }
    hs.push_back(h);
    residuals.push_back(res_max);
    adj_curve.rows.push_back({h, res_max});

    // (b) forward drift problem: discrete solves exist but cannot settle;
    // W^{1,2} norms across refinements are the blow-up proxy.
    Eigen::SparseMatrix<double> A_fwd = assemble_stiffness(*mesh);
    A_fwd += assemble_div_drift(*mesh, drift);
    const RhsFunctional rhs = RhsFunctional::from_flux(
        mesh,
        [gamma, N](const VecN& x) {
          const double r = x.norm();
          VecN F(N);
          if (r > 0.0) {
            const double mag = -std::pow(r, gamma + 1.0 - static_cast<double>(N));
            for (int k = 0; k < N; ++k) F[k] = mag * x[k] / r;
          }
          return F;
        },
        2.0);
    Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(
        rhs.node_actions().data(), static_cast<Eigen::Index>(rhs.node_actions().size()));
    apply_dirichlet(*mesh, A_fwd, &b);
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(A_fwd);
    double norm_fwd = std::numeric_limits<double>::quiet_NaN();
    if (lu.info() == Eigen::Success) {
      const Eigen::VectorXd uf = lu.solve(b);
      if (uf.allFinite()) {
        std::vector<double> uc(uf.data(), uf.data() + uf.size());
        norm_fwd = norm_w1p(DiscreteFunction(mesh, std::move(uc)), 2.0);
      }
    }
    const double growth = fwd_norms.empty() || !(norm_fwd > 0.0)
                              ? 0.0
                              : norm_fwd / fwd_norms.back();
    fwd_norms.push_back(norm_fwd);
    fwd_curve.rows.push_back({h, norm_fwd, growth});
  }

  const double order = fit_order(hs, residuals);
  cr.entries.push_back(CaseEntry::threshold("adjoint_residual_order", order, min_order,
                                            "decay rate of the normalized adjoint residual"));
  double total_growth = 0.0;
  if (fwd_norms.size() >= 2 && fwd_norms.front() > 0.0)
    total_growth = fwd_norms.back() / fwd_norms.front();
  cr.entries.push_back(CaseEntry::recorded(
      "forward_norm_growth_total", total_growth,
      "blow-up proxy only: nonexistence is not reproducible as a finite computation", true));
  cr.entries.push_back(CaseEntry::recorded(
      "forward_norm_finest", fwd_norms.empty() ? 0.0 : fwd_norms.back(), {}, true));
  cr.curves.push_back(std::move(adj_curve));
  cr.curves.push_back(std::move(fwd_curve));
  return cr;
}

CaseResult example_resonance(int N, int refinements, int base_cells) {
  if (N < 2) throw OutOfRange("example_resonance: N >= 2 required");
  CaseResult cr;
  cr.id = "resonance_N" + std::to_string(N);
  cr.params = {{"N", static_cast<double>(N)}, {"refinements", static_cast<double>(refinements)}};

  CaseCurve curve;
  curve.name = "singularity_vs_h";
  curve.columns = {"h", "lambda_h", "sigma_min", "sigma_max_est", "condition_estimate"};

  double shifted_residual = 0.0, defect = 0.0, ls_residual = 0.0;
  std::vector<double> sigmas;
  for (int j = 0; j < refinements; ++j) {
    const int cells = base_cells << j;
    const auto mesh = Mesh::radial(N, 1.0, cells);
    const double h = 1.0 / static_cast<double>(cells);
    const int n = mesh->n_nodes();

    Eigen::SparseMatrix<double> K = assemble_stiffness(*mesh);
    Eigen::SparseMatrix<double> M = assemble_mass(*mesh);
    // Zero mass rows/cols of the boundary so K - lambda M keeps its identity
    // block there.
    for (int k = 0; k < M.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(M, k); it; ++it)
        if (mesh->is_boundary_node(static_cast<int>(it.row())) ||
            mesh->is_boundary_node(static_cast<int>(it.col())))
          it.valueRef() = 0.0;
    M.prune(0.0);

    auto zero_boundary = [&](Eigen::VectorXd& x) {
      for (int i : mesh->boundary_nodes()) x[i] = 0.0;
    };

    // Inverse iteration for the smallest Dirichlet eigenpair.
    Eigen::SparseLU<Eigen::SparseMatrix<double>> luK;
    luK.compute(K);
    if (luK.info() != Eigen::Success) throw Error("example_resonance: stiffness factorization failed");
    Eigen::VectorXd x = Eigen::VectorXd::Ones(n);
    zero_boundary(x);
    double lambda = 0.0;
    for (int it = 0; it < 500; ++it) {
      Eigen::VectorXd y = M * x;
      zero_boundary(y);
      x = luK.solve(y);
      zero_boundary(x);
      x /= x.norm();
      const double num = x.dot(K * x), den = x.dot(M * x);
      const double lam = num / den;
      if (std::abs(lam - lambda) <= 1e-12 * std::abs(lam) && it > 3) {
        lambda = lam;
        break;
      }
      lambda = lam;
    }

    Eigen::SparseMatrix<double> S = K - lambda * M;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> luS;
    luS.compute(S);
    double sigma_min = 0.0;
    if (luS.info() == Eigen::Success) {
      Eigen::VectorXd z = Eigen::VectorXd::Random(n);
      zero_boundary(z);
      z /= z.norm();
      for (int it = 0; it < 50; ++it) {
        Eigen::VectorXd y = luS.solve(z);
        zero_boundary(y);
        const double yn = y.norm();
        if (!(yn > 0.0) || !y.allFinite()) break;
        z = y / yn;
      }
      sigma_min = std::abs(z.dot(S * z));
    }
    // Largest |eigenvalue| of S by power iteration.
    Eigen::VectorXd pz = Eigen::VectorXd::Random(n);
    pz /= pz.norm();
    for (int it = 0; it < 100; ++it) {
      Eigen::VectorXd y = S * pz;
      pz = y / y.norm();
    }
    const double sigma_max = std::abs(pz.dot(S * pz));
    sigmas.push_back(sigma_min);
    curve.rows.push_back({h, lambda, sigma_min, sigma_max, sigma_max / std::max(sigma_min, 1e-300)});

    if (j == refinements - 1) {
      // Datum = eigenfunction: its component against the kernel, measured in
      // the L^2 (mass) inner product, is exactly one.
      const Eigen::VectorXd w = x;
      const Eigen::VectorXd Mw = M * w;
      defect = std::abs(w.dot(M * x)) / std::sqrt(w.dot(Mw) * x.dot(M * x));

      // 10% spectral shift restores solvability.
      Eigen::SparseMatrix<double> Ss = K - 0.9 * lambda * M;
      Eigen::SparseLU<Eigen::SparseMatrix<double>> luSs;
      luSs.compute(Ss);
      if (luSs.info() == Eigen::Success) {
        Eigen::VectorXd rhsv = Mw;
        zero_boundary(rhsv);
        const Eigen::VectorXd u = luSs.solve(rhsv);
        shifted_residual = (Ss * u - rhsv).norm() / rhsv.norm();
      } else {
        shifted_residual = std::numeric_limits<double>::infinity();
      }

      // Orthogonalized datum: least-squares solution through kernel deflation.
      Eigen::VectorXd wt = Eigen::VectorXd::Random(n);
      zero_boundary(wt);
      wt -= x * (wt.dot(M * x)) / x.dot(M * x);
      Eigen::VectorXd bt = M * wt;
      zero_boundary(bt);
      if (luS.info() == Eigen::Success) {
        Eigen::VectorXd u = luS.solve(bt);
        zero_boundary(u);
        u -= x * u.dot(x);  // remove the kernel component the solve amplified
        ls_residual = (S * u - bt).norm() / bt.norm();
      } else {
        ls_residual = std::numeric_limits<double>::infinity();
      }
    }
  }

  cr.entries.push_back(CaseEntry::recorded("sigma_min_finest", sigmas.back(),
                                           "singular to roundoff at the discrete eigenvalue",
                                           true));
  cr.entries.push_back(CaseEntry::threshold("kernel_defect_of_datum", defect, 0.9,
                                            "normalized component of the datum along the kernel"));
  CaseEntry sh = CaseEntry::checked("shifted_system_residual", shifted_residual, 0.0, 1e-8, true,
                                    "relative residual after a 10% off-spectrum shift");
  cr.entries.push_back(sh);
  cr.entries.push_back(
      CaseEntry::recorded("deflated_least_squares_residual", ls_residual, {}, true));
  cr.curves.push_back(std::move(curve));
  return cr;
}

CaseResult regularity_probe(double r, const QuasilinearField& field,
                            const std::function<VecN(const VecN&)>& F, const ScalarProfile& phi,
                            const SolveConfig& config,
                            const std::vector<std::shared_ptr<const Mesh>>& meshes,
                            double ratio_tol) {
  const StructuralEnvelope& env = field.envelope;
  const double p = env.p;
  const int N = env.N;
  if (!(p < r && r < static_cast<double>(N)))
    throw OutOfRange("regularity_probe: need p < r < N");
  if (meshes.empty()) throw Error("regularity_probe: at least one mesh required");

  CaseResult cr;
  cr.id = "regularity_r" + CsvWriter::format(r);
  const double p_star = sobolev_exponent(N, p);
  const double r_star = static_cast<double>(N) * r / (static_cast<double>(N) - r);
  const double kappa = r_star / p_star;
  const double lambda = kappa - 1.0;
  cr.params = {{"r", r}, {"p", p}, {"N", static_cast<double>(N)}};
  cr.entries.push_back(CaseEntry::recorded("p_star", p_star));
  cr.entries.push_back(CaseEntry::recorded("r_star", r_star));
  cr.entries.push_back(CaseEntry::recorded("lambda", lambda));
  cr.entries.push_back(CaseEntry::checked("exponent_identity", lambda * r * p / (r - p), r_star,
                                          1e-12, false, "lambda r p/(r-p) = r*"));

  // Tightened distance gate. The Sobolev constant comes from the config or
  // from the finest mesh.
  SobolevConstant S = config.sobolev ? *config.sobolev
                                     : sobolev_constant(N, p, meshes.back());
  const double delta = std::pow(env.alpha, 1.0 / p) / S.value * (p_star / r_star);
  const SampledScalarField b_fine = env.sample_b_for_measure(*meshes.back());
  const double dist = dist_to_bounded(b_fine, static_cast<double>(N), 1e-6);
  cr.entries.push_back(CaseEntry::recorded("delta_threshold", delta, "(alpha^{1/p}/S)*(p*/r*)"));
  cr.entries.push_back(CaseEntry::recorded("distance_measured", dist));
  if (!(dist < delta))
    throw DistanceTooLarge("regularity_probe: tightened distance condition violated: dist = " +
                               std::to_string(dist) + " >= delta = " + std::to_string(delta),
                           dist, delta);

  // Bootstrap exponent chain: r itself when r <= p*, else stages through the
  // iterated Sobolev gains.
  std::vector<double> stage_exponents;
  if (r <= p_star) {
    stage_exponents.push_back(r);
  } else {
    double e = p_star;
    while (true) {
      stage_exponents.push_back(std::min(r, e));
      if (e >= r || !(e < static_cast<double>(N))) break;
      e = static_cast<double>(N) * e / (static_cast<double>(N) - e);
    }
  }

  SolveConfig cfg = config;
  cfg.sobolev = S;

  CaseCurve curve;
  curve.name = "ratio_vs_h";
  curve.columns = {"h", "lhs", "rhs", "ratio"};
  std::vector<double> ratios;
  std::optional<DiscreteFunction> u_finest;
  for (const auto& mesh : meshes) {
    const RhsFunctional rhs = RhsFunctional::from_flux(mesh, F, p);
    FixedPointResult sol = truncation_continuation(field, rhs, cfg);
    const DiscreteFunction& u = sol.u;

    double lhs_pow = 0.0, Fr = 0.0, phir = 0.0;
    for (int q = 0; q < mesh->n_quad(); ++q) {
      const double w = mesh->quad_weight(q);
      const double uv = std::abs(u.value_at_quad(q));
      const double gv = u.gradient_at_quad(q).norm();
      lhs_pow += w * std::pow(kappa * std::pow(uv, kappa - 1.0) * gv, p);
      Fr += w * std::pow(F(mesh->quad_position(q)).norm(), r);
      phir += w * std::pow(std::abs(phi(mesh->quad_position(q))), r);
    }
    const double lhs = std::pow(lhs_pow, 1.0 / p);
    const double rhs_base = std::pow(Fr, 1.0 / r) + std::pow(phir, 1.0 / r) + lp_norm(u, r);
    const double rhs_val = std::pow(rhs_base, kappa);
    const double ratio = lhs / rhs_val;
    ratios.push_back(ratio);
    curve.rows.push_back({mesh->max_cell_diameter(), lhs, rhs_val, ratio});
    u_finest = u;
  }
  const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  const double variation = (*hi - *lo) / std::max(*hi, 1e-300);
  cr.entries.push_back(CaseEntry::checked("ratio_variation", variation, 0.0, ratio_tol, true,
                                          "spread of lhs/rhs across refinements"));
  cr.entries.push_back(CaseEntry::recorded("ratio_finest", ratios.back()));

  // Bootstrap stages measured on the finest solution.
  if (stage_exponents.size() > 1 && u_finest) {
    const auto& mesh = meshes.back();
    CaseCurve stages;
    stages.name = "bootstrap_stages";
    stages.columns = {"stage", "exponent", "lambda_stage", "ratio"};
    for (std::size_t s = 0; s < stage_exponents.size(); ++s) {
      const double rs = stage_exponents[s];
      if (!(rs < static_cast<double>(N))) break;
      const double rs_star = static_cast<double>(N) * rs / (static_cast<double>(N) - rs);
      const double ks = rs_star / p_star;
      double lhs_pow = 0.0, Fr = 0.0, phir = 0.0;
      for (int q = 0; q < mesh->n_quad(); ++q) {
        const double w = mesh->quad_weight(q);
        const double uv = std::abs(u_finest->value_at_quad(q));
        const double gv = u_finest->gradient_at_quad(q).norm();
        lhs_pow += w * std::pow(ks * std::pow(uv, ks - 1.0) * gv, p);
        Fr += w * std::pow(F(mesh->quad_position(q)).norm(), rs);
        phir += w * std::pow(std::abs(phi(mesh->quad_position(q))), rs);
      }
      const double rhs_base =
          std::pow(Fr, 1.0 / rs) + std::pow(phir, 1.0 / rs) + lp_norm(*u_finest, rs);
      const double ratio = std::pow(lhs_pow, 1.0 / p) / std::pow(rhs_base, ks);
      stages.rows.push_back({static_cast<double>(s), rs, ks - 1.0, ratio});
      cr.entries.push_back(CaseEntry::recorded("bootstrap_ratio_stage" + std::to_string(s), ratio));
    }
    cr.curves.push_back(std::move(stages));
  }
  cr.curves.push_back(std::move(curve));
  return cr;
}

}  // namespace qelab
