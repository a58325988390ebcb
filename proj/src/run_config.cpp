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
#include "qelab/run_config.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <thread>

#include "qelab/csv.hpp"

namespace qelab {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

[[noreturn]] void config_fail(const std::string& where, const std::string& what) {
  throw ConfigError("config field '" + where + "': " + what);
}

double get_num(const json& j, const std::string& key, const std::string& ctx) {
  if (!j.contains(key)) config_fail(ctx + "." + key, "missing");
  if (!j[key].is_number()) config_fail(ctx + "." + key, "expected a number");
  return j[key].get<double>();
}

double get_num_or(const json& j, const std::string& key, double fallback) {
  return j.contains(key) ? j[key].get<double>() : fallback;
}

ScalarProfile parse_profile(const json& j, const std::string& ctx) {
  if (!j.is_object() || !j.contains("profile")) config_fail(ctx, "expected {profile: ...}");
  const std::string kind = j["profile"].get<std::string>();
  if (kind == "constant") return ScalarProfile::constant(get_num(j, "value", ctx));
  if (kind == "inverse_radius") return ScalarProfile::inverse_radius(get_num(j, "amplitude", ctx));
  if (kind == "power_law")
    return ScalarProfile::power_law(get_num(j, "amplitude", ctx), get_num(j, "exponent", ctx));
  config_fail(ctx + ".profile", "unknown profile '" + kind + "'");
}

std::shared_ptr<const Mesh> parse_domain(const json& j) {
  if (!j.is_object()) config_fail("domain", "expected an object");
  const std::string kind = j.value("kind", "radial");
  if (kind == "radial") {
    return Mesh::radial(static_cast<int>(get_num(j, "N", "domain")),
                        get_num(j, "radius", "domain"),
                        static_cast<int>(get_num(j, "cells", "domain")),
                        get_num_or(j, "grading", 1.0));
  }
  if (kind == "disc") {
    return Mesh::disc(get_num(j, "radius", "domain"),
                      static_cast<int>(get_num(j, "rings", "domain")));
  }
  config_fail("domain.kind", "unknown kind '" + kind + "'");
}

QuasilinearField parse_field(const json& j, int N, Mesh::Kind domain_kind) {
  if (!j.is_object()) config_fail("field", "expected an object");
  const double p = get_num(j, "p", "field");
  const ScalarProfile b =
      j.contains("b") ? parse_profile(j["b"], "field.b") : ScalarProfile::constant(0.0);
  const ScalarProfile phi =
      j.contains("phi") ? parse_profile(j["phi"], "field.phi") : ScalarProfile::constant(0.0);
  const double b_sign = get_num_or(j, "b_direction_sign", 1.0);
  const double inflation = get_num_or(j, "b_inflation", 2.0);

  // The principal coefficient: a constant symmetric matrix, or a named
  // scalar profile times the identity.
  if (j.contains("h_matrix")) {
    const json& m = j["h_matrix"];
    if (!m.is_array() || static_cast<int>(m.size()) != N)
      config_fail("field.h_matrix", "expected an NxN array");
    MatN H(N);
    for (int a = 0; a < N; ++a)
      for (int bcol = 0; bcol < N; ++bcol)
        H(a, bcol) = m.at(static_cast<std::size_t>(a)).at(static_cast<std::size_t>(bcol)).get<double>();
    for (int a = 0; a < N; ++a)
      for (int bcol = 0; bcol < a; ++bcol)
        if (std::abs(H(a, bcol) - H(bcol, a)) > 1e-14)
          config_fail("field.h_matrix", "matrix must be symmetric");
    bool isotropic = true;
    for (int a = 0; a < N && isotropic; ++a)
      for (int bcol = 0; bcol < N && isotropic; ++bcol)
        if (std::abs(H(a, bcol) - (a == bcol ? H(0, 0) : 0.0)) > 1e-14) isotropic = false;
    if (domain_kind == Mesh::Kind::radial && !isotropic)
      config_fail("field.h_matrix",
                  "anisotropic principal parts break radial symmetry; use a planar domain");
    if (!j.contains("h_bounds"))
      config_fail("field.h_bounds", "required with h_matrix (eigenvalue bounds)");
    const double h_lower = j["h_bounds"].at(0).get<double>();
    const double h_upper = j["h_bounds"].at(1).get<double>();
    ModelData data;
    data.N = N;
    data.p = p;
    data.h_lower = h_lower;
    data.h_upper = h_upper;
    data.H = [H](const VecN&) { return H; };
    const ModelData dir = ModelData::radial(N, p, ScalarProfile::constant(1.0), 1.0, 1.0, b, b_sign);
    data.B = dir.B;
    return QuasilinearField::model(data, model_envelope(data, b, phi, inflation));
  }

  const ScalarProfile h =
      j.contains("h") ? parse_profile(j["h"], "field.h") : ScalarProfile::constant(1.0);
  double h_lower = 1.0, h_upper = 1.0;
  if (j.contains("h_bounds")) {
    h_lower = j["h_bounds"].at(0).get<double>();
    h_upper = j["h_bounds"].at(1).get<double>();
  } else if (h.name == "constant") {
    h_lower = h_upper = h.amplitude;
  } else {
    config_fail("field.h_bounds", "required when h is not a constant profile");
  }
  const ModelData data = ModelData::radial(N, p, h, h_lower, h_upper, b, b_sign);
  return QuasilinearField::model(data, model_envelope(data, b, phi, inflation));
}

RhsFunctional parse_rhs(const json& j, const std::shared_ptr<const Mesh>& mesh, double p) {
  if (!j.is_object()) config_fail("rhs", "expected an object");
  const std::string kind = j.value("kind", "zero");
  if (kind == "zero") return RhsFunctional::zero(mesh);
  if (kind == "constant") return RhsFunctional::constant_load(mesh, get_num(j, "value", "rhs"));
  if (kind == "flux_radial") {
    const ScalarProfile prof = parse_profile(j["profile"], "rhs.profile");
    const int N = mesh->ambient_dim();
    return RhsFunctional::from_flux(
        mesh,
        [prof, N](const VecN& x) {
          const double r = x.norm();
          VecN F(N);
          if (r > 0.0) {
            const double mag = prof(x);
            for (int k = 0; k < N; ++k) F[k] = mag * x[k] / r;
          }
          return F;
        },
        p);
  }
  config_fail("rhs.kind", "unknown kind '" + kind + "'");
}

std::optional<Obstacle> parse_obstacle(const json& j, const std::shared_ptr<const Mesh>& mesh) {
  if (j.is_null()) return std::nullopt;
  if (!j.is_object()) config_fail("obstacle", "expected an object or null");
  const std::string kind = j["profile"].get<std::string>();
  if (kind == "none") return Obstacle::unconstrained(mesh);
  if (kind == "constant") return Obstacle::constant(mesh, get_num(j, "value", "obstacle"));
  if (kind == "power_law") {
    if (mesh->kind() != Mesh::Kind::radial)
      config_fail("obstacle.profile", "radial profiles need a radial domain");
    const ScalarProfile prof =
        ScalarProfile::power_law(get_num(j, "amplitude", "obstacle"), get_num(j, "exponent", "obstacle"));
    std::vector<double> psi(static_cast<std::size_t>(mesh->n_nodes()));
    for (int i = 0; i < mesh->n_nodes(); ++i)
      psi[static_cast<std::size_t>(i)] = prof.at_radius(mesh->node_r()[static_cast<std::size_t>(i)]);
    return Obstacle(mesh, std::move(psi));
  }
  if (kind == "nodal_csv") {
    std::ifstream in(j.at("path").get<std::string>());
    if (!in) config_fail("obstacle.path", "cannot open file");
    std::vector<double> psi;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      psi.push_back(std::stod(csv_split(line).back()));
    }
    return Obstacle(mesh, std::move(psi));
  }
  config_fail("obstacle.profile", "unknown profile '" + kind + "'");
}

SolveConfig parse_solver(const json& j) {
  SolveConfig c;
  if (j.is_null()) return c;
  c.newton_tol = get_num_or(j, "newton_tol", c.newton_tol);
  c.max_newton = static_cast<int>(get_num_or(j, "max_newton", c.max_newton));
  c.picard_tol = get_num_or(j, "picard_tol", c.picard_tol);
  c.max_picard = static_cast<int>(get_num_or(j, "max_picard", c.max_picard));
  c.relaxation = get_num_or(j, "relaxation", c.relaxation);
  if (j.contains("anderson")) c.anderson = j["anderson"].get<bool>();
  if (j.contains("continuation_steps"))
    c.continuation_steps = j["continuation_steps"].get<std::vector<double>>();
  if (j.contains("truncation_schedule"))
    c.truncation_schedule = j["truncation_schedule"].get<std::vector<double>>();
  c.sigma_levels = static_cast<int>(get_num_or(j, "sigma_levels", c.sigma_levels));
  c.validate();
  return c;
}

}  // namespace

RunConfig RunConfig::from_json(const json& j, const std::string& output_override) {
  RunConfig rc;
  rc.seed = static_cast<unsigned>(get_num_or(j, "seed", 1.0));
  rc.output_dir = output_override.empty() ? j.value("output_dir", std::string("out"))
                                          : output_override;
  if (const char* root = std::getenv("QELAB_OUTPUT_ROOT"); root && output_override.empty())
    rc.output_dir = (fs::path(root) / rc.output_dir).string();
  if (!j.contains("domain")) config_fail("domain", "missing");
  rc.mesh = parse_domain(j["domain"]);
  if (!j.contains("field")) config_fail("field", "missing");
  rc.field = parse_field(j["field"], rc.mesh->ambient_dim(), rc.mesh->kind());
  rc.rhs = parse_rhs(j.value("rhs", json::object()), rc.mesh, rc.field.envelope.p);
  rc.obstacle = parse_obstacle(j.value("obstacle", json()), rc.mesh);
  rc.solver = parse_solver(j.value("solver", json()));
  if (j.contains("sobolev_override"))
    rc.solver.sobolev = sobolev_constant(rc.field.envelope.N, rc.field.envelope.p, nullptr,
                                         j["sobolev_override"].get<double>());
  return rc;
}

RunConfig RunConfig::from_file(const std::string& path, const std::string& output_override) {
  return from_json(load_config_json(path, {}), output_override);
}

nlohmann::json load_config_json(const std::string& path, const std::vector<std::string>& sets) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error in '" + path + "': " + e.what());
  }
  for (const std::string& kv : sets) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos)
      throw ConfigError("--set expects key.path=value, got '" + kv + "'");
    std::string pointer = "/" + kv.substr(0, eq);
    for (char& ch : pointer)
      if (ch == '.') ch = '/';
    json value;
    try {
      value = json::parse(kv.substr(eq + 1));
    } catch (const json::parse_error&) {
      value = kv.substr(eq + 1);  // bare strings allowed
    }
    j[json::json_pointer(pointer)] = value;
  }
  return j;
}

int exit_status_for(const CaseResult& result) {
  if (!result.passed()) return 1;
  return result.has_recorded_deviation() ? 2 : 0;
}

namespace {

void write_solution_artifacts(const RunConfig& rc, const DiscreteFunction& u,
                              const SolveReport& report) {
  fs::create_directories(rc.output_dir);
  {
    std::ofstream out(fs::path(rc.output_dir) / "solution.csv", std::ios::binary);
    u.write_csv(out);
  }
  {
    std::ofstream out(fs::path(rc.output_dir) / "report.json", std::ios::binary);
    out << report.to_json_text() << '\n';
  }
  {
    std::ofstream out(fs::path(rc.output_dir) / "history.csv", std::ios::binary);
    report.write_history_csv(out);
  }
}

int cmd_solve(const std::string& config_path, const std::string& out_override,
              const std::vector<std::string>& sets) {
  const RunConfig rc = RunConfig::from_json(load_config_json(config_path, sets), out_override);
  try {
    FixedPointResult res = truncation_continuation(rc.field, rc.rhs, rc.solver);
    write_solution_artifacts(rc, res.u, res.report);
    std::cout << "solve: converged, ||u||_W1p = " << norm_w1p(res.u, rc.field.envelope.p)
              << ", artifacts in " << rc.output_dir << "\n";
    return 0;
  } catch (const DistanceTooLarge& e) {
    std::cerr << "solve: " << e.what() << "\n";
    return 1;
  }
}

int cmd_obstacle(const std::string& config_path, const std::string& out_override,
                 const std::vector<std::string>& sets) {
  const RunConfig rc = RunConfig::from_json(load_config_json(config_path, sets), out_override);
  if (!rc.obstacle) throw ConfigError("obstacle subcommand requires an obstacle block");
  FixedPointResult res = vi_truncation_scheme(rc.field, rc.rhs, *rc.obstacle, rc.solver);
  write_solution_artifacts(rc, res.u, res.report);
  const ComplementarityReport comp =
      complementarity_residual(res.u, *rc.obstacle, rc.field, rc.rhs, {}, rc.seed);
  {
    std::ofstream out(fs::path(rc.output_dir) / "contact_set.csv", std::ios::binary);
    CsvWriter w(out);
    w.row(std::vector<std::string>{"node"});
    for (int i = 0; i < rc.mesh->n_nodes(); ++i)
      if (rc.obstacle->node_constrained(i) &&
          res.u.coeffs()[static_cast<std::size_t>(i)] -
                  rc.obstacle->psi()[static_cast<std::size_t>(i)] <=
              1e-10)
        w.row(std::vector<std::string>{std::to_string(i)});
  }
  std::cout << "obstacle: converged, contact nodes = " << comp.contact_nodes
            << ", min probe slack = " << comp.min_normalized << "\n";
  return 0;
}

int cmd_verify(const std::string& case_name, const json& flags, const std::string& out_dir) {
  CaseResult result;
  if (case_name == "dist_radial") {
    result = dist_radial(flags.value("B", 1.0), flags.value("N", 2));
  } else if (case_name == "concentration") {
    std::vector<int> ns = flags.value("n_list", std::vector<int>{1, 2, 4, 8});
    result = example_concentration(flags.value("N", 3), flags.value("p", 2.0), ns,
                                   flags.value("cells", 1 << 14));
  } else if (case_name == "nonexistence") {
    result = example_nonexistence(flags.value("gamma", 1.0), flags.value("N", 3),
                                  flags.value("refinements", 3));
  } else if (case_name == "resonance") {
    result = example_resonance(flags.value("N", 2), flags.value("refinements", 3));
  } else if (case_name == "regularity") {
    const int N = flags.value("N", 3);
    const double p = flags.value("p", 2.0);
    const double r = flags.value("r", 2.5);
    const double B = flags.value("b_amplitude", 0.05);
    const ScalarProfile b = ScalarProfile::inverse_radius(B);
    const ScalarProfile phi = ScalarProfile::constant(flags.value("phi", 0.1));
    const ModelData data = ModelData::radial(N, p, ScalarProfile::constant(1.0), 1.0, 1.0, b);
    const QuasilinearField field = QuasilinearField::model(data, model_envelope(data, b, phi));
    std::vector<std::shared_ptr<const Mesh>> meshes;
    const int base = flags.value("cells", 128);
    for (int j = 0; j < 3; ++j) meshes.push_back(Mesh::radial(N, 1.0, base << j));
    SolveConfig cfg;
    result = regularity_probe(r, field,
                              [N](const VecN& x) {
                                VecN F(N);
                                for (int k = 0; k < N; ++k) F[k] = x[k];
                                return F;
                              },
                              phi, cfg, meshes);
  } else {
    throw ConfigError("unknown verification case '" + case_name + "'");
  }
  result.write(out_dir);
  std::cout << result.summary() << "\n";
  return exit_status_for(result);
}

int cmd_lorentz(const std::string& op, const std::string& csv_path, double p, double q,
                bool weak, double arg, const std::string& out_path) {
  std::ifstream in(csv_path);
  if (!in) throw ConfigError("cannot open field CSV '" + csv_path + "'");
  const SampledScalarField f = SampledScalarField::read_csv(in);
  if (op == "quasinorm") {
    const LorentzIndex idx = weak ? LorentzIndex::weak(p) : LorentzIndex::pq(p, q);
    std::cout << lorentz_quasinorm(f, idx) << "\n";
    return 0;
  }
  if (op == "distribution") {
    std::cout << distribution_function(f, arg) << "\n";
    return 0;
  }
  if (op == "dist") {
    const DistToBoundedResult res = dist_to_bounded_curve(f, p, arg > 0 ? arg : 1e-6);
    std::cout << res.value << "\n";
    if (!out_path.empty()) {
      std::ofstream out(out_path, std::ios::binary);
      CsvWriter w(out);
      w.row(std::vector<std::string>{"k", "weak_norm_of_residual"});
      for (const auto& [k, v] : res.history) w.row(std::vector<double>{k, v});
    }
    return 0;
  }
  if (op == "closure") {
    const ClosureResult res = is_in_closure(f, p, arg > 0 ? arg : 1e-2);
    std::cout << (res.in_closure ? "true" : "false")
              << (res.inconclusive ? " (inconclusive tail)" : "") << "\n";
    if (!out_path.empty()) {
      std::ofstream out(out_path, std::ios::binary);
      CsvWriter w(out);
      w.row(std::vector<std::string>{"t", "lambda", "t_lambda_pow"});
      for (const CurvePoint& cp : res.curve)
        w.row(std::vector<double>{cp.t, cp.lambda, cp.weak_value});
    }
    return 0;
  }
  if (op == "truncate") {
    const SampledScalarField g = truncate(f, arg);
    std::ofstream out(out_path.empty() ? (csv_path + ".truncated.csv") : out_path,
                      std::ios::binary);
    g.write_csv(out);
    return 0;
  }
  throw ConfigError("unknown lorentz op '" + op + "'");
}

int cmd_sweep(const std::string& config_path, const std::string& out_override) {
  std::ifstream in(config_path);
  if (!in) throw ConfigError("cannot open config file '" + config_path + "'");
  json j = json::parse(in);
  if (!j.contains("sweep") || !j["sweep"].is_array())
    throw ConfigError("sweep config requires a 'sweep' array of override objects");
  const json sweeps = j["sweep"];
  const int workers = std::max(1, j.value("workers", 1));
  j.erase("sweep");

  std::vector<int> status(sweeps.size(), 0);
  std::vector<json> run_configs;
  for (std::size_t k = 0; k < sweeps.size(); ++k) {
    json jk = j;
    jk.merge_patch(sweeps[static_cast<std::size_t>(k)]);
    run_configs.push_back(std::move(jk));
  }
  // Independent runs, bounded worker pool, no shared state beyond the
  // disjoint output directories.
  std::size_t next = 0;
  std::mutex mtx;
  auto worker = [&] {
    for (;;) {
      std::size_t k;
      {
        std::lock_guard<std::mutex> lock(mtx);
        if (next >= run_configs.size()) return;
        k = next++;
      }
      try {
        const std::string base = out_override.empty()
                                     ? run_configs[k].value("output_dir", std::string("out"))
                                     : out_override;
        RunConfig rc = RunConfig::from_json(run_configs[k],
                                            (fs::path(base) / ("run" + std::to_string(k))).string());
        FixedPointResult res = rc.obstacle && !rc.obstacle->is_unconstrained()
                                   ? vi_truncation_scheme(rc.field, rc.rhs, *rc.obstacle, rc.solver)
                                   : truncation_continuation(rc.field, rc.rhs, rc.solver);
        write_solution_artifacts(rc, res.u, res.report);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(mtx);
        std::cerr << "sweep run " << k << ": " << e.what() << "\n";
        status[k] = 1;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  for (int s : status)
    if (s != 0) return 1;
  std::cout << "sweep: " << run_configs.size() << " runs completed\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"quasilinear elliptic laboratory: noncoercive Dirichlet and obstacle problems"};
  app.require_subcommand(1);

  std::string config_path, out_override;
  std::vector<std::string> solve_sets;
  auto* solve = app.add_subcommand("solve", "run the truncated-coefficient scheme");
  solve->add_option("config", config_path, "JSON config")->required();
  solve->add_option("--output-dir", out_override, "override the output directory");
  solve->add_option("--set", solve_sets, "override a config key: key.path=value");

  std::string ob_config, ob_out;
  std::vector<std::string> ob_sets;
  auto* obst = app.add_subcommand("obstacle", "run the obstacle scheme");
  obst->add_option("config", ob_config, "JSON config")->required();
  obst->add_option("--output-dir", ob_out, "override the output directory");
  obst->add_option("--set", ob_sets, "override a config key: key.path=value");

  std::string case_name, verify_out = "out";
  double vB = 1.0, vp = 2.0, vgamma = 1.0, vr = 2.5, vphi = 0.1, vbamp = 0.05;
  int vN = 0, vcells = 0, vrefine = 3;
  std::vector<int> vns;
  auto* verify = app.add_subcommand("verify", "run a verification case");
  verify->add_option("case", case_name,
                     "dist_radial | concentration | nonexistence | resonance | regularity")
      ->required();
  verify->add_option("--B", vB, "profile amplitude");
  verify->add_option("--N", vN, "dimension");
  verify->add_option("--p", vp, "exponent p");
  verify->add_option("--gamma", vgamma, "drift strength");
  verify->add_option("--r", vr, "datum integrability");
  verify->add_option("--phi", vphi, "phi level");
  verify->add_option("--b-amplitude", vbamp, "b amplitude for the regularity probe");
  verify->add_option("--cells", vcells, "base mesh cells");
  verify->add_option("--refinements", vrefine, "number of refinements");
  verify->add_option("--n", vns, "concentration indices")->delimiter(',');
  verify->add_option("--output-dir", verify_out, "output directory");

  std::string lop, lcsv, lout;
  double lp = 2.0, lq = 2.0, larg = 0.0;
  bool lweak = false;
  auto* lor = app.add_subcommand("lorentz", "measure a sampled field");
  lor->add_option("op", lop, "quasinorm | distribution | dist | closure | truncate")->required();
  lor->add_option("--csv", lcsv, "field CSV")->required();
  lor->add_option("--p", lp, "first index");
  lor->add_option("--q", lq, "second index");
  lor->add_flag("--weak", lweak, "q = infinity");
  lor->add_option("--t", larg, "threshold / tolerance / truncation level");
  lor->add_option("--out", lout, "curve / field output CSV");

  std::string sweep_config, sweep_out;
  auto* sweep = app.add_subcommand("sweep", "fan out independent runs");
  sweep->add_option("config", sweep_config, "JSON config with a 'sweep' array")->required();
  sweep->add_option("--output-dir", sweep_out, "override the output root");

  std::vector<const char*> argv;
  argv.push_back("qelab");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*solve) return cmd_solve(config_path, out_override, solve_sets);
    if (*obst) return cmd_obstacle(ob_config, ob_out, ob_sets);
    if (*verify) {
      json flags;
      if (vN > 0) flags["N"] = vN;
      flags["B"] = vB;
      flags["p"] = vp;
      flags["gamma"] = vgamma;
      flags["r"] = vr;
      flags["phi"] = vphi;
      flags["b_amplitude"] = vbamp;
      if (vcells > 0) flags["cells"] = vcells;
      flags["refinements"] = vrefine;
      if (!vns.empty()) flags["n_list"] = vns;
      return cmd_verify(case_name, flags, verify_out);
    }
    if (*lor) return cmd_lorentz(lop, lcsv, lp, lq, lweak, larg, lout);
    if (*sweep) return cmd_sweep(sweep_config, sweep_out);
  } catch (const DistanceTooLarge& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace qelab
