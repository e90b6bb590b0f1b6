// Copyright 2026 The Frantic Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FRANTIC_TOOLS_CLI_HPP
#define FRANTIC_TOOLS_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "frantic/cs_core.hpp"

namespace frantic::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kRuntime = 2 };

/// Entry point shared by the binary and the tests. Results go to --out (or
/// `out` when absent), logs and usage text to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

nlohmann::json matrix_to_json(const cs::MeasurementMatrix& A, int k, double mu_factor);
cs::MeasurementMatrix matrix_from_json(const nlohmann::json& j);

}  // namespace frantic::cli

#endif  // FRANTIC_TOOLS_CLI_HPP
