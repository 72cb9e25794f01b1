//
// Copyright 2026 The dppca Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef DPPCA_CLI_HPP
#define DPPCA_CLI_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dppca::cli {

inline constexpr int kSchemaVersion = 1;

enum class Command { kFit, kSensitivity, kAudit, kSweep, kCalibrate };

// Parsed command line. Validation happens in run(); parse errors and
// validation failures both exit with code 2.
struct RunConfig {
  Command command = Command::kFit;

  std::string input;
  std::string format = "dense-csv";  // dense-csv | sparse-coo
  std::string scale_policy = "reject";  // reject | rescale

  std::int64_t k = 1;
  double eps_p = 0.0;
  std::optional<double> delta_p;
  bool pure = false;
  double eps_g = 0.1;
  double constant_c = 0.0;  // 0 selects the calibrated default
  double tol = 1e-10;
  std::int64_t max_iter = 0;
  std::optional<std::uint64_t> seed;
  std::string out;  // empty writes to stdout
  bool trace = false;

  // audit
  std::string neighbor_input;
  std::int64_t trials = 100000;
  std::int64_t bins = 60;
  double slack = 0.5;

  // sweep
  std::int64_t synth_d = 8;
  double synth_gap = 0.5;
  std::string synth_kind = "two-point";  // two-point | spiked
  std::vector<std::int64_t> n_grid;
  std::int64_t runs = 50;
  std::string csv_out;

  // calibrate
  std::int64_t budget = 2000;
};

struct RunResult {
  int exit_code = 0;
  std::string json;            // full document, includes the timestamp
  std::string json_canonical;  // timestamp excluded; byte-stable given a seed
  std::string csv;             // sweep curves when requested
};

// Executes a validated config. Exit codes: 0 success, 2 configuration or
// input validation failure, 3 numerical failure. Errors produce a structured
// JSON document instead of a payload.
RunResult run(const RunConfig& config);

// Full command-line entry point: parse, run, write --out/--csv files or
// stdout. Returns the process exit code.
int main_with_args(int argc, const char* const* argv);

}  // namespace dppca::cli

#endif  // DPPCA_CLI_HPP
