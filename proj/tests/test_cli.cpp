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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "dppca/cli.hpp"
#include "dppca/synthetic.hpp"
#include "test_util.hpp"

using namespace dppca;
using dppca::cli::Command;
using dppca::cli::RunConfig;
using dppca::cli::RunResult;
using dppca::testing::TempFile;
using nlohmann::json;

namespace {

struct BinaryResult {
  int exit_code = -1;
  std::string output;
};

BinaryResult run_binary(const std::string& args) {
  const std::string cmd =
      std::string(DPPCA_CLI_BINARY) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  BinaryResult result;
  char buffer[4096];
  std::size_t got = 0;
  while ((got = fread(buffer, 1, sizeof(buffer), pipe)) > 0) {
    result.output.append(buffer, got);
  }
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

RunConfig sensitivity_config(const std::string& input_path) {
  RunConfig config;
  config.command = Command::kSensitivity;
  config.input = input_path;
  config.eps_p = 1.0;
  config.delta_p = 0.01;
  config.constant_c = 1.0;
  config.seed = 7;
  return config;
}

const std::string kThreeCopiesCsv = "1,0\n1,0\n1,0\n";

}  // namespace

TEST_CASE("pure mode forbids delta") {
  TempFile file(kThreeCopiesCsv);
  RunConfig config = sensitivity_config(file.path());
  config.pure = true;  // delta_p still set
  const RunResult result = dppca::cli::run(config);
  CHECK(result.exit_code == 2);
  const json doc = json::parse(result.json);
  CHECK(doc["error"]["type"] == "validation");
}

TEST_CASE("missing seed is a validation error") {
  TempFile file(kThreeCopiesCsv);
  RunConfig config = sensitivity_config(file.path());
  config.seed.reset();
  const RunResult result = dppca::cli::run(config);
  CHECK(result.exit_code == 2);
}

TEST_CASE("sensitivity payload on three copies of e1") {
  TempFile file(kThreeCopiesCsv);
  const RunResult result = dppca::cli::run(sensitivity_config(file.path()));
  REQUIRE(result.exit_code == 0);
  const json doc = json::parse(result.json);
  CHECK(doc["command"] == "sensitivity");
  CHECK(doc["n"] == 3);
  CHECK(doc["gap"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(doc["ls_bound"].get<double>() ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(doc["schema_version"] == 1);
  CHECK(doc.contains("generated_at_unix_ms"));
  // No private direction in the sensitivity payload.
  CHECK(result.json_canonical.find("private_output") == std::string::npos);
}

TEST_CASE("canonical payload is byte-identical across runs") {
  TempFile file(kThreeCopiesCsv);
  const RunConfig config = sensitivity_config(file.path());
  const RunResult a = dppca::cli::run(config);
  const RunResult b = dppca::cli::run(config);
  CHECK(a.json_canonical == b.json_canonical);

  RunConfig fit_config = config;
  fit_config.command = Command::kFit;
  const RunResult f1 = dppca::cli::run(fit_config);
  const RunResult f2 = dppca::cli::run(fit_config);
  REQUIRE(f1.exit_code == 0);
  CHECK(f1.json_canonical == f2.json_canonical);

  fit_config.seed = 8;
  const RunResult f3 = dppca::cli::run(fit_config);
  CHECK(f1.json_canonical != f3.json_canonical);
}

TEST_CASE("golden canonical payload") {
  TempFile file(kThreeCopiesCsv);
  const RunResult result = dppca::cli::run(sensitivity_config(file.path()));
  REQUIRE(result.exit_code == 0);
  const std::string golden_path =
      std::string(DPPCA_TEST_DIR) + "/golden/sensitivity_three_copies.json";
  if (std::getenv("DPPCA_REGEN_GOLDEN") != nullptr) {
    std::ofstream out(golden_path);
    out << result.json_canonical;
    MESSAGE("regenerated golden file");
    return;
  }
  std::ifstream in(golden_path);
  REQUIRE(in.good());
  std::stringstream buffer;
  buffer << in.rdbuf();
  CHECK(result.json_canonical == buffer.str());
}

TEST_CASE("fit payload carries the private direction but never raw points") {
  TempFile file("0.9,0.1\n0.8,-0.2\n0.7,0.3\n0.95,0\n");
  RunConfig config = sensitivity_config(file.path());
  config.command = Command::kFit;
  const RunResult result = dppca::cli::run(config);
  REQUIRE(result.exit_code == 0);
  const json doc = json::parse(result.json);
  CHECK(doc.contains("private_output_columns"));
  CHECK(doc["private_output_columns"].size() == 1);
  CHECK(doc["private_output_columns"][0].size() == 2);
  CHECK(doc.contains("noise_scale"));
  CHECK(doc.contains("smooth_bound"));
  CHECK(!doc.contains("trace"));
  // Schema hygiene: nothing in the payload echoes the input rows.
  for (const auto& [key, value] : doc.items()) {
    CHECK(key != "points");
    CHECK(key != "rows");
    CHECK(key != "input_data");
  }

  config.trace = true;
  const RunResult traced = dppca::cli::run(config);
  const json traced_doc = json::parse(traced.json);
  CHECK(traced_doc.contains("trace"));
  CHECK(traced_doc["trace"].contains("noise_columns"));
}

TEST_CASE("numerical failures exit with code 3") {
  TempFile file("0.9,0.1,0\n0.5,0.5,0.1\n0.2,0.8,0.2\n0.4,0.4,0.6\n");
  RunConfig config = sensitivity_config(file.path());
  config.command = Command::kFit;
  config.max_iter = 1;  // force non-convergence
  config.tol = 1e-14;
  const RunResult result = dppca::cli::run(config);
  CHECK(result.exit_code == 3);
  const json doc = json::parse(result.json);
  CHECK(doc["error"]["type"] == "numerical");
}

TEST_CASE("audit subcommand runs the control when no neighbor is given") {
  SyntheticSpec spec{2, 0.8, SyntheticKind::kTwoPoint};
  const Dataset ds = synth_generate(spec, 16, 3);
  std::ostringstream csv;
  for (Eigen::Index i = 0; i < ds.n(); ++i) {
    csv << ds.point(i)[0] << "," << ds.point(i)[1] << "\n";
  }
  TempFile file(csv.str());
  RunConfig config;
  config.command = Command::kAudit;
  config.input = file.path();
  config.eps_p = 1.0;
  config.delta_p = 0.05;
  config.seed = 11;
  config.trials = 4000;
  config.bins = 24;
  const RunResult result = dppca::cli::run(config);
  REQUIRE(result.exit_code == 0);
  const json doc = json::parse(result.json);
  CHECK(doc["control"] == true);
  CHECK(doc["eps_hat"].get<double>() <= 0.1);
}

TEST_CASE("sweep subcommand emits records and csv") {
  RunConfig config;
  config.command = Command::kSweep;
  config.eps_p = 1.0;
  config.delta_p = 0.01;
  config.eps_g = 0.1;
  config.synth_d = 4;
  config.synth_gap = 0.5;
  config.synth_kind = "two-point";
  config.n_grid = {40, 160};
  config.runs = 10;
  config.seed = 13;
  const RunResult result = dppca::cli::run(config);
  REQUIRE(result.exit_code == 0);
  const json doc = json::parse(result.json);
  CHECK(doc["records"].size() == 4);
  CHECK(result.csv.rfind("n,mode,success_fraction,median_excess\n", 0) == 0);

  const RunResult again = dppca::cli::run(config);
  CHECK(result.json_canonical == again.json_canonical);
}

TEST_CASE("calibrate subcommand reports the recommended constant") {
  RunConfig config;
  config.command = Command::kCalibrate;
  config.budget = 64;
  config.seed = 17;
  const RunResult result = dppca::cli::run(config);
  REQUIRE(result.exit_code == 0);
  const json doc = json::parse(result.json);
  CHECK(doc["instances"].size() >= 30);
  CHECK(doc["recommended_c"].get<double>() ==
        doctest::Approx(1.2 * doc["max_implied_c"].get<double>()));

  const RunResult again = dppca::cli::run(config);
  CHECK(result.json_canonical == again.json_canonical);
}

TEST_CASE("binary end to end") {
  TempFile file(kThreeCopiesCsv);

  SUBCASE("fit succeeds and prints JSON") {
    const BinaryResult r = run_binary(
        "fit --input " + file.path() +
        " --eps-p 1 --delta-p 0.01 --seed 7 --constant-c 1");
    CHECK(r.exit_code == 0);
    const json doc = json::parse(r.output);
    CHECK(doc["command"] == "fit");
    CHECK(doc["gap"].get<double>() == doctest::Approx(1.0));
  }

  SUBCASE("same seed, same canonical bytes") {
    const std::string args =
        "sensitivity --input " + file.path() +
        " --eps-p 1 --delta-p 0.01 --seed 7 --constant-c 1";
    json a = json::parse(run_binary(args).output);
    json b = json::parse(run_binary(args).output);
    a.erase("generated_at_unix_ms");
    b.erase("generated_at_unix_ms");
    CHECK(a.dump() == b.dump());
  }

  SUBCASE("pure plus delta exits 2") {
    const BinaryResult r = run_binary(
        "fit --input " + file.path() +
        " --eps-p 1 --delta-p 0.01 --pure --seed 7");
    CHECK(r.exit_code == 2);
  }

  SUBCASE("missing required flag exits 2") {
    const BinaryResult r = run_binary("fit --input " + file.path());
    CHECK(r.exit_code == 2);
  }

  SUBCASE("unknown subcommand exits 2") {
    const BinaryResult r = run_binary("frobnicate");
    CHECK(r.exit_code == 2);
  }
}
