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

#include "qelab/cases.hpp"

namespace qelab {

/// Problem description parsed from a JSON config: domain, field, datum,
/// optional obstacle, solver settings, output location.
struct RunConfig {
  unsigned seed = 1;
  std::string output_dir = "out";
  std::shared_ptr<const Mesh> mesh;
  QuasilinearField field;
  RhsFunctional rhs;
  std::optional<Obstacle> obstacle;
  SolveConfig solver;

  static RunConfig from_json(const nlohmann::json& j, const std::string& output_override = {});
  static RunConfig from_file(const std::string& path, const std::string& output_override = {});
};

/// Parses a config file and applies `--set key.path=value` overrides (values
/// are JSON literals, bare words fall back to strings). Flags mirror config
/// keys; a flag wins over the file.
nlohmann::json load_config_json(const std::string& path, const std::vector<std::string>& sets);

/// Exit status contract: 0 all checks passed, 2 passed but deviations were
/// recorded rather than asserted, 1 failure or error.
int exit_status_for(const CaseResult& result);

/// Front door used by the qelab binary and by tests (in-process).
int run_cli(const std::vector<std::string>& args);

}  // namespace qelab
