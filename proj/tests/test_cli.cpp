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

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "doctest.h"

using namespace qelab;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("qelab_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string write_config(const fs::path& dir, const nlohmann::json& j) {
  const fs::path p = dir / "config.json";
  std::ofstream out(p);
  out << j.dump(2);
  return p.string();
}

nlohmann::json base_config(const std::string& outdir) {
  return nlohmann::json{
      {"seed", 7},
      {"output_dir", outdir},
      {"domain", {{"kind", "radial"}, {"N", 3}, {"radius", 1.0}, {"cells", 64}}},
      {"field",
       {{"p", 2.0},
        {"b", {{"profile", "inverse_radius"}, {"amplitude", 0.05}}},
        {"phi", {{"profile", "constant"}, {"value", 0.0}}}}},
      {"rhs", {{"kind", "constant"}, {"value", 1.0}}}};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("solve subcommand writes deterministic artifacts") {
  const fs::path dir = scratch_dir("solve");
  const std::string cfg = write_config(dir, base_config((dir / "out").string()));

  CHECK(run_cli({"solve", cfg, "--output-dir", (dir / "run1").string()}) == 0);
  CHECK(run_cli({"solve", cfg, "--output-dir", (dir / "run2").string()}) == 0);
  CHECK(fs::exists(dir / "run1" / "solution.csv"));
  CHECK(fs::exists(dir / "run1" / "report.json"));
  CHECK(fs::exists(dir / "run1" / "history.csv"));
  // Same config twice: byte-identical outputs.
  CHECK(slurp(dir / "run1" / "solution.csv") == slurp(dir / "run2" / "solution.csv"));
  CHECK(slurp(dir / "run1" / "history.csv") == slurp(dir / "run2" / "history.csv"));
  fs::remove_all(dir);
}

TEST_CASE("solve with zero datum exits 0 and returns the zero solution") {
  const fs::path dir = scratch_dir("zero");
  nlohmann::json j = base_config((dir / "out").string());
  j["rhs"] = {{"kind", "zero"}};
  const std::string cfg = write_config(dir, j);
  CHECK(run_cli({"solve", cfg}) == 0);
  // Every solution value is exactly zero.
  std::ifstream in(dir / "out" / "solution.csv");
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    CHECK(std::stod(line.substr(line.find(',') + 1)) == 0.0);
  }
  fs::remove_all(dir);
}

TEST_CASE("solve surfaces the distance condition with measured values") {
  const fs::path dir = scratch_dir("gate");
  nlohmann::json j = base_config((dir / "out").string());
  j["field"]["b"]["amplitude"] = 3.0;    // far beyond the threshold
  j["sobolev_override"] = 1.0;
  const std::string cfg = write_config(dir, j);
  CHECK(run_cli({"solve", cfg}) == 1);
  fs::remove_all(dir);
}

TEST_CASE("obstacle subcommand writes the contact set") {
  const fs::path dir = scratch_dir("obstacle");
  nlohmann::json j = base_config((dir / "out").string());
  j["rhs"] = {{"kind", "constant"}, {"value", -3.0}};
  j["obstacle"] = {{"profile", "constant"}, {"value", -0.05}};
  const std::string cfg = write_config(dir, j);
  CHECK(run_cli({"obstacle", cfg}) == 0);
  CHECK(fs::exists(dir / "out" / "contact_set.csv"));
  const std::string contact = slurp(dir / "out" / "contact_set.csv");
  CHECK(contact.find("node") == 0);
  CHECK(contact.size() > 6);  // nonempty contact under the downward load
  fs::remove_all(dir);
}

TEST_CASE("verify subcommand: pass with artifacts, record-only exit code") {
  const fs::path dir = scratch_dir("verify");
  CHECK(run_cli({"verify", "dist_radial", "--B", "1", "--N", "2", "--output-dir",
                 (dir / "v1").string()}) == 0);
  CHECK(fs::exists(dir / "v1" / "dist_radial_B1_N2" / "result.json"));

  // The drift counterexample records its blow-up proxy: exit 2.
  CHECK(run_cli({"verify", "nonexistence", "--gamma", "1", "--N", "3", "--cells", "32",
                 "--output-dir", (dir / "v2").string()}) == 2);
  fs::remove_all(dir);
}

TEST_CASE("lorentz subcommand measures an exported field") {
  const fs::path dir = scratch_dir("lorentz");
  const SampledScalarField f(1, {0.0, 1.0}, {3.0, 3.0}, {1.0, 1.5}, 2.5);
  const fs::path csv = dir / "f.csv";
  {
    std::ofstream out(csv, std::ios::binary);
    f.write_csv(out);
  }
  CHECK(run_cli({"lorentz", "quasinorm", "--csv", csv.string(), "--p", "2", "--q", "2"}) == 0);
  CHECK(run_cli({"lorentz", "dist", "--csv", csv.string(), "--p", "2"}) == 0);
  CHECK(run_cli({"lorentz", "closure", "--csv", csv.string(), "--p", "2", "--t", "0.01",
                 "--out", (dir / "curve.csv").string()}) == 0);
  CHECK(fs::exists(dir / "curve.csv"));
  CHECK(run_cli({"lorentz", "truncate", "--csv", csv.string(), "--t", "2.0", "--out",
                 (dir / "trunc.csv").string()}) == 0);
  std::ifstream in(dir / "trunc.csv");
  const SampledScalarField g = SampledScalarField::read_csv(in);
  CHECK(g.values()[0] == 2.0);
  fs::remove_all(dir);
}

TEST_CASE("sweep fans out independent runs") {
  const fs::path dir = scratch_dir("sweep");
  nlohmann::json j = base_config((dir / "out").string());
  j["workers"] = 2;
  j["sweep"] = nlohmann::json::array();
  j["sweep"].push_back({{"rhs", {{"kind", "constant"}, {"value", 1.0}}}});
  j["sweep"].push_back({{"rhs", {{"kind", "constant"}, {"value", 2.0}}}});
  const std::string cfg = write_config(dir, j);
  CHECK(run_cli({"sweep", cfg}) == 0);
  CHECK(fs::exists(dir / "out" / "run0" / "solution.csv"));
  CHECK(fs::exists(dir / "out" / "run1" / "solution.csv"));
  CHECK(slurp(dir / "out" / "run0" / "solution.csv") !=
        slurp(dir / "out" / "run1" / "solution.csv"));
  fs::remove_all(dir);
}

TEST_CASE("config validation errors name the offending field") {
  const fs::path dir = scratch_dir("badcfg");
  nlohmann::json j = base_config((dir / "out").string());
  j.erase("domain");
  const std::string cfg = write_config(dir, j);
  CHECK_THROWS_WITH_AS(RunConfig::from_file(cfg), doctest::Contains("domain"), ConfigError);

  nlohmann::json j2 = base_config((dir / "out").string());
  j2["field"]["b"] = {{"profile", "mystery"}};
  const std::string cfg2 = write_config(dir, j2);
  CHECK_THROWS_WITH_AS(RunConfig::from_file(cfg2), doctest::Contains("field.b"), ConfigError);

  // Malformed JSON surfaces a parse diagnostic, and the CLI turns it into
  // exit code 1.
  const fs::path broken = dir / "broken.json";
  std::ofstream(broken) << "{ not json";
  CHECK_THROWS_AS(RunConfig::from_file(broken.string()), ConfigError);
  CHECK(run_cli({"solve", broken.string()}) == 1);
  fs::remove_all(dir);
}

TEST_CASE("verify subcommand covers the remaining cases with proper exit codes") {
  const fs::path dir = scratch_dir("verify2");
  // Concentration: all entries asserted, no recorded deviations.
  CHECK(run_cli({"verify", "concentration", "--N", "3", "--p", "2", "--cells", "2048",
                 "--output-dir", (dir / "c").string()}) == 0);
  // Resonance: singularity curve and least-squares outcome are recorded.
  CHECK(run_cli({"verify", "resonance", "--N", "2", "--cells", "32", "--refinements", "2",
                 "--output-dir", (dir / "r").string()}) == 2);
  // Regularity: informational parameters recorded, checks asserted.
  CHECK(run_cli({"verify", "regularity", "--N", "3", "--p", "2", "--r", "2.5", "--cells", "32",
                 "--output-dir", (dir / "g").string()}) == 0);
  fs::remove_all(dir);
}

TEST_CASE("lorentz distribution op and nodal-CSV obstacle config") {
  const fs::path dir = scratch_dir("extra");
  const SampledScalarField f(1, {0.0, 1.0}, {1.0, 0.5}, {0.25, 0.75}, 1.0);
  const fs::path csv = dir / "f.csv";
  {
    std::ofstream out(csv, std::ios::binary);
    f.write_csv(out);
  }
  CHECK(run_cli({"lorentz", "distribution", "--csv", csv.string(), "--t", "0.7"}) == 0);

  // Nodal obstacle read back from a solution-format CSV.
  nlohmann::json j = base_config((dir / "out").string());
  j["rhs"] = {{"kind", "constant"}, {"value", -3.0}};
  {
    const auto mesh = Mesh::radial(3, 1.0, 64);
    const DiscreteFunction psi =
        DiscreteFunction::interpolate_radial(mesh, [](double r) { return -0.05 - 0.01 * r; });
    std::ofstream out(dir / "psi.csv", std::ios::binary);
    psi.write_csv(out);
  }
  j["obstacle"] = {{"profile", "nodal_csv"}, {"path", (dir / "psi.csv").string()}};
  const std::string cfg = write_config(dir, j);
  CHECK(run_cli({"obstacle", cfg}) == 0);

  // Radial power-law obstacle profile.
  nlohmann::json j2 = base_config((dir / "out2").string());
  j2["rhs"] = {{"kind", "constant"}, {"value", -3.0}};
  j2["obstacle"] = {{"profile", "power_law"}, {"amplitude", -0.08}, {"exponent", 2.0}};
  const fs::path cfg2p = dir / "config2.json";
  std::ofstream(cfg2p) << j2.dump(2);
  CHECK(run_cli({"obstacle", cfg2p.string()}) == 0);
  fs::remove_all(dir);
}

TEST_CASE("--set flag overrides config keys, and the env var relocates outputs") {
  const fs::path dir = scratch_dir("setflag");
  nlohmann::json j = base_config((dir / "out").string());
  const std::string cfg = write_config(dir, j);
  CHECK(run_cli({"solve", cfg, "--output-dir", (dir / "o1").string(), "--set",
                 "domain.cells=32", "--set", "rhs.value=2.0"}) == 0);
  // 32 cells -> 33 solution rows plus the header.
  std::ifstream in(dir / "o1" / "solution.csv");
  int lines = 0;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) ++lines;
  CHECK(lines == 34);

  setenv("QELAB_OUTPUT_ROOT", (dir / "rooted").c_str(), 1);
  nlohmann::json j2 = base_config("rel_out");
  const fs::path cfg2 = dir / "cfg2.json";
  std::ofstream(cfg2) << j2.dump(2);
  CHECK(run_cli({"solve", cfg2.string()}) == 0);
  unsetenv("QELAB_OUTPUT_ROOT");
  CHECK(fs::exists(dir / "rooted" / "rel_out" / "solution.csv"));
  fs::remove_all(dir);
}

TEST_CASE("constant-matrix principal coefficient on a planar domain") {
  const fs::path dir = scratch_dir("hmat");
  nlohmann::json j;
  j["seed"] = 1;
  j["output_dir"] = (dir / "out").string();
  j["domain"] = {{"kind", "disc"}, {"radius", 1.0}, {"rings", 8}};
  j["field"] = {{"p", 1.9},
                {"h_matrix", {{2.0, 0.5}, {0.5, 1.0}}},
                {"h_bounds", {0.79, 2.21}}};
  j["rhs"] = {{"kind", "constant"}, {"value", 1.0}};
  const std::string cfg = write_config(dir, j);
  CHECK(run_cli({"solve", cfg}) == 0);

  // The same matrix is rejected on a radial domain (breaks radial symmetry),
  // and asymmetric matrices are rejected outright.
  nlohmann::json j2 = j;
  j2["domain"] = {{"kind", "radial"}, {"N", 2}, {"radius", 1.0}, {"cells", 16}};
  const fs::path cfg2 = dir / "cfg2.json";
  std::ofstream(cfg2) << j2.dump(2);
  CHECK(run_cli({"solve", cfg2.string()}) == 1);

  nlohmann::json j3 = j;
  j3["field"]["h_matrix"] = {{2.0, 0.5}, {0.4, 1.0}};
  const fs::path cfg3 = dir / "cfg3.json";
  std::ofstream(cfg3) << j3.dump(2);
  CHECK(run_cli({"solve", cfg3.string()}) == 1);
  fs::remove_all(dir);
}
