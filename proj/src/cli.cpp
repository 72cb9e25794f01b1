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

#include "dppca/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "dppca/audit.hpp"
#include "dppca/canonical_json.hpp"
#include "dppca/dataset.hpp"
#include "dppca/errors.hpp"
#include "dppca/mechanism.hpp"
#include "dppca/pca.hpp"
#include "dppca/sensitivity.hpp"
#include "dppca/synthetic.hpp"

namespace dppca::cli {

namespace {

using nlohmann::ordered_json;

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

std::string command_name(Command c) {
  switch (c) {
    case Command::kFit: return "fit";
    case Command::kSensitivity: return "sensitivity";
    case Command::kAudit: return "audit";
    case Command::kSweep: return "sweep";
    case Command::kCalibrate: return "calibrate";
  }
  return "unknown";
}

std::string mode_name(PrivacyMode mode) {
  return mode == PrivacyMode::kApprox ? "approx" : "pure";
}

ordered_json matrix_columns(const Eigen::MatrixXd& m) {
  ordered_json cols = ordered_json::array();
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    ordered_json col = ordered_json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) col.push_back(m(i, j));
    cols.push_back(std::move(col));
  }
  return cols;
}

DatasetFormat parse_format(const std::string& format) {
  if (format == "dense-csv") return DatasetFormat::kDenseCsv;
  if (format == "sparse-coo") return DatasetFormat::kSparseCoo;
  throw ValidationError("unknown format: " + format);
}

ScalePolicy parse_policy(const std::string& policy) {
  if (policy == "reject") return ScalePolicy::kReject;
  if (policy == "rescale") return ScalePolicy::kRescale;
  throw ValidationError("unknown scale policy: " + policy);
}

SyntheticKind parse_kind(const std::string& kind) {
  if (kind == "two-point") return SyntheticKind::kTwoPoint;
  if (kind == "spiked") return SyntheticKind::kSpiked;
  throw ValidationError("unknown synthetic kind: " + kind);
}

double effective_constant(const RunConfig& config) {
  return config.constant_c > 0.0 ? config.constant_c
                                 : kCalibratedSensitivityConstant;
}

PrivacyParams build_params(const RunConfig& config, std::int64_t d) {
  if (config.pure) {
    if (config.delta_p.has_value()) {
      throw ValidationError("--pure forbids --delta-p");
    }
    return PrivacyParams::pure(config.eps_p, d, effective_constant(config));
  }
  if (!config.delta_p.has_value()) {
    throw ValidationError("approximate mode requires --delta-p (or pass --pure)");
  }
  return PrivacyParams::approx(config.eps_p, *config.delta_p, d,
                               effective_constant(config));
}

std::uint64_t require_seed(const RunConfig& config) {
  if (!config.seed.has_value()) {
    throw ValidationError("--seed is required; there is no silent entropy source");
  }
  return *config.seed;
}

void append_params(ordered_json& doc, const PrivacyParams& params) {
  doc["mode"] = mode_name(params.mode);
  doc["eps_p"] = params.eps_p;
  if (params.mode == PrivacyMode::kApprox) doc["delta_p"] = params.delta_p;
  doc["constant_c"] = params.c_sens;
  doc["d"] = params.d;
}

void append_profile(ordered_json& doc, const SensitivityProfile& profile) {
  doc["gap"] = profile.gap;
  doc["beta"] = profile.beta;
  doc["ls_bound"] = profile.ls_bound;
  doc["smooth_bound"] = profile.smooth_bound;
  doc["argmax_k"] = profile.argmax_k;
}

ordered_json run_fit(const RunConfig& config) {
  const std::uint64_t seed = require_seed(config);
  const Dataset data = ingest(config.input, parse_format(config.format),
                              parse_policy(config.scale_policy));
  const PrivacyParams params = build_params(config, data.dim());
  MechanismOptions options;
  options.solver.tol = config.tol;
  options.solver.max_iter = config.max_iter;
  const MechanismRecord record =
      private_pca(data, config.k, params, options, seed);

  ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["command"] = "fit";
  append_params(doc, params);
  doc["k"] = config.k;
  doc["n"] = data.n();
  doc["seed"] = seed;
  append_profile(doc, record.profile);
  doc["noise_scale"] = record.noise.scale;
  doc["private_output_columns"] = matrix_columns(record.output);
  if (config.trace) {
    // Privacy-unsafe diagnostics: the pre-noise solution and the raw draw.
    ordered_json trace;
    ordered_json eigenvalues = ordered_json::array();
    for (Eigen::Index i = 0; i < record.solution.eigenvalues.size(); ++i) {
      eigenvalues.push_back(record.solution.eigenvalues[i]);
    }
    trace["eigenvalues"] = std::move(eigenvalues);
    trace["solver_residual"] = record.solution.residual;
    trace["pre_noise_columns"] = matrix_columns(record.solution.basis);
    trace["frame_columns"] = matrix_columns(record.frame);
    trace["aligned_columns"] = matrix_columns(record.aligned);
    trace["noise_columns"] = matrix_columns(record.noise.matrix);
    doc["trace"] = std::move(trace);
  }
  return doc;
}

ordered_json run_sensitivity(const RunConfig& config) {
  const std::uint64_t seed = require_seed(config);
  const Dataset data = ingest(config.input, parse_format(config.format),
                              parse_policy(config.scale_policy));
  const PrivacyParams params = build_params(config, data.dim());
  SolverOptions solver;
  solver.tol = config.tol;
  solver.max_iter = config.max_iter;
  solver.seed = seed;
  const PcaSolution solution = solve_pca(data, config.k, solver);
  const SensitivityProfile profile =
      smooth_sensitivity_profile(data.n(), solution.gap, params);

  ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["command"] = "sensitivity";
  append_params(doc, params);
  doc["k"] = config.k;
  doc["n"] = data.n();
  doc["seed"] = seed;
  append_profile(doc, profile);
  doc["degenerate_gap"] = solution.degenerate_gap;
  return doc;
}

ordered_json run_audit(const RunConfig& config) {
  const std::uint64_t seed = require_seed(config);
  const Dataset data = ingest(config.input, parse_format(config.format),
                              parse_policy(config.scale_policy));
  const bool control = config.neighbor_input.empty();
  const Dataset neighbor =
      control ? data
              : ingest(config.neighbor_input, parse_format(config.format),
                       parse_policy(config.scale_policy));
  const PrivacyParams params = build_params(config, data.dim());
  MechanismOptions options;
  options.solver.tol = config.tol;
  options.solver.max_iter = config.max_iter;
  const AuditReport report =
      privacy_audit(data, neighbor, params, 1, config.trials, config.bins,
                    seed, config.slack, options);

  ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["command"] = "audit";
  append_params(doc, params);
  doc["control"] = control;
  doc["trials"] = report.trials;
  doc["bins"] = report.bins;
  doc["slack"] = report.slack;
  doc["seed"] = seed;
  doc["eps_hat"] = report.eps_hat;
  doc["excluded_bins"] = report.excluded_bins;
  doc["violations"] = report.violations;
  doc["diverged"] = report.diverged;
  doc["notes"] = report.notes;
  return doc;
}

ordered_json run_sweep(const RunConfig& config, std::string* csv) {
  const std::uint64_t seed = require_seed(config);
  if (config.pure) {
    throw ValidationError("sweep runs both modes; supply --delta-p, not --pure");
  }
  if (config.n_grid.empty()) {
    throw ValidationError("sweep requires --n-grid");
  }
  SyntheticSpec spec;
  spec.d = config.synth_d;
  spec.gap = config.synth_gap;
  spec.kind = parse_kind(config.synth_kind);
  const PrivacyParams params = build_params(config, config.synth_d);
  const std::vector<SweepRecord> records = sample_complexity_sweep(
      spec, params, config.eps_g, config.n_grid, config.runs, seed);

  ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["command"] = "sweep";
  append_params(doc, params);
  doc["kind"] = config.synth_kind;
  doc["gap"] = config.synth_gap;
  doc["eps_g"] = config.eps_g;
  doc["runs"] = config.runs;
  doc["seed"] = seed;
  ordered_json rows = ordered_json::array();
  std::ostringstream csv_stream;
  csv_stream << "n,mode,success_fraction,median_excess\n";
  for (const auto& r : records) {
    ordered_json row;
    row["n"] = r.n;
    row["mode"] = mode_name(r.mode);
    row["success_fraction"] = r.success_fraction;
    row["median_excess"] = r.median_excess;
    rows.push_back(std::move(row));
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", r.success_fraction);
    csv_stream << r.n << ',' << mode_name(r.mode) << ',' << buf << ',';
    std::snprintf(buf, sizeof(buf), "%.17g", r.median_excess);
    csv_stream << buf << '\n';
  }
  doc["records"] = std::move(rows);
  if (csv != nullptr) *csv = csv_stream.str();
  return doc;
}

ordered_json run_calibrate(const RunConfig& config) {
  const std::uint64_t seed = require_seed(config);
  const CalibrationReport report = run_calibration(config.budget, seed);

  ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["command"] = "calibrate";
  doc["budget"] = config.budget;
  doc["seed"] = seed;
  ordered_json rows = ordered_json::array();
  for (const auto& inst : report.instances) {
    ordered_json row;
    row["name"] = inst.name;
    row["n"] = inst.n;
    row["gap"] = inst.gap;
    row["ls_estimate"] = inst.estimate;
    row["implied_c"] = inst.implied_c;
    rows.push_back(std::move(row));
  }
  doc["instances"] = std::move(rows);
  doc["max_implied_c"] = report.max_implied_c;
  doc["recommended_c"] = report.recommended_c;
  return doc;
}

ordered_json error_document(const RunConfig& config, const std::string& type,
                            const std::string& message) {
  ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["command"] = command_name(config.command);
  ordered_json error;
  error["type"] = type;
  error["message"] = message;
  doc["error"] = std::move(error);
  return doc;
}

std::int64_t now_unix_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

}  // namespace

RunResult run(const RunConfig& config) {
  RunResult result;
  ordered_json doc;
  try {
    std::string csv;
    switch (config.command) {
      case Command::kFit: doc = run_fit(config); break;
      case Command::kSensitivity: doc = run_sensitivity(config); break;
      case Command::kAudit: doc = run_audit(config); break;
      case Command::kSweep: doc = run_sweep(config, &csv); break;
      case Command::kCalibrate: doc = run_calibrate(config); break;
    }
    result.exit_code = 0;
    result.csv = std::move(csv);
  } catch (const ValidationError& e) {
    doc = error_document(config, "validation", e.what());
    result.exit_code = kExitValidation;
  } catch (const NumericalError& e) {
    doc = error_document(config, "numerical", e.what());
    result.exit_code = kExitNumerical;
  } catch (const std::exception& e) {
    doc = error_document(config, "internal", e.what());
    result.exit_code = kExitNumerical;
  }
  result.json_canonical = canonical_dump(doc);
  doc["generated_at_unix_ms"] = now_unix_ms();
  result.json = canonical_dump(doc);
  return result;
}

int main_with_args(int argc, const char* const* argv) {
  CLI::App app{"Differentially private PCA via calibrated output perturbation"};
  app.require_subcommand(1);

  RunConfig config;

  const auto add_io = [&config](CLI::App* sub, bool with_neighbor) {
    sub->add_option("--input", config.input, "Input dataset path")->required();
    sub->add_option("--format", config.format,
                    "Input format: dense-csv or sparse-coo");
    sub->add_option("--scale-policy", config.scale_policy,
                    "Out-of-ball handling: reject or rescale");
    if (with_neighbor) {
      sub->add_option("--neighbor-input", config.neighbor_input,
                      "Neighboring dataset; omitted runs the identical-"
                      "dataset control");
    }
  };
  const auto add_privacy = [&config](CLI::App* sub) {
    sub->add_option("--eps-p", config.eps_p, "Privacy budget in (0, 1]")
        ->required();
    sub->add_option("--delta-p", config.delta_p,
                    "Failure probability (approximate mode only)");
    sub->add_flag("--pure", config.pure,
                  "Pure mode: Cauchy noise, no delta, more noise");
    sub->add_option("--constant-c", config.constant_c,
                    "Sensitivity constant (default: calibrated value)");
  };
  const auto add_solver = [&config](CLI::App* sub) {
    sub->add_option("--k", config.k, "Target rank (guarantees proven for 1)");
    sub->add_option("--tol", config.tol, "Solver residual tolerance");
    sub->add_option("--max-iter", config.max_iter,
                    "Iteration cap per eigenpair (0 = automatic)");
  };
  const auto add_seed_out = [&config](CLI::App* sub) {
    sub->add_option("--seed", config.seed, "Master seed (required)")
        ->required();
    sub->add_option("--out", config.out, "Output JSON path (default stdout)");
  };

  CLI::App* fit = app.add_subcommand("fit", "Release a private direction");
  add_io(fit, false);
  add_privacy(fit);
  add_solver(fit);
  add_seed_out(fit);
  fit->add_flag("--trace", config.trace,
                "Include the full mechanism trace (privacy-unsafe)");

  CLI::App* sensitivity =
      app.add_subcommand("sensitivity", "Report the sensitivity profile only");
  add_io(sensitivity, false);
  add_privacy(sensitivity);
  add_solver(sensitivity);
  add_seed_out(sensitivity);

  CLI::App* audit = app.add_subcommand(
      "audit", "Empirical privacy-loss estimate on a neighboring pair");
  add_io(audit, true);
  add_privacy(audit);
  add_solver(audit);
  add_seed_out(audit);
  audit->add_option("--trials", config.trials, "Mechanism runs per side");
  audit->add_option("--bins", config.bins, "Angle histogram bins");
  audit->add_option("--slack", config.slack,
                    "Allowed estimation slack above eps-p");

  CLI::App* sweep = app.add_subcommand(
      "sweep", "Sample-complexity curves on synthetic data, both modes");
  add_privacy(sweep);
  add_seed_out(sweep);
  sweep->add_option("--d", config.synth_d, "Synthetic dimension");
  sweep->add_option("--gap", config.synth_gap, "Population eigengap");
  sweep->add_option("--kind", config.synth_kind,
                    "Synthetic family: two-point or spiked");
  sweep->add_option("--eps-g", config.eps_g, "Target excess risk");
  sweep->add_option("--n-grid", config.n_grid, "Sample sizes, ascending")
      ->required()
      ->delimiter(',');
  sweep->add_option("--runs", config.runs, "Monte Carlo runs per grid point");
  sweep->add_option("--csv", config.csv_out, "Also write curves as CSV");

  CLI::App* calibrate = app.add_subcommand(
      "calibrate", "Brute-force sensitivity calibration over the corpus");
  add_seed_out(calibrate);
  calibrate->add_option("--budget", config.budget,
                        "Addition candidates per instance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    ordered_json doc;
    doc["schema_version"] = kSchemaVersion;
    ordered_json error;
    error["type"] = "validation";
    error["message"] = e.what();
    doc["error"] = std::move(error);
    std::cout << canonical_dump(doc);
    std::cerr << e.what() << "\n";
    return kExitValidation;
  }

  if (fit->parsed()) config.command = Command::kFit;
  if (sensitivity->parsed()) config.command = Command::kSensitivity;
  if (audit->parsed()) config.command = Command::kAudit;
  if (sweep->parsed()) config.command = Command::kSweep;
  if (calibrate->parsed()) config.command = Command::kCalibrate;

  const RunResult result = run(config);

  if (!config.out.empty()) {
    std::ofstream out(config.out);
    if (!out) {
      std::cerr << "cannot write to " << config.out << "\n";
      return kExitValidation;
    }
    out << result.json;
  } else {
    std::cout << result.json;
  }
  if (!config.csv_out.empty() && !result.csv.empty()) {
    std::ofstream csv(config.csv_out);
    if (!csv) {
      std::cerr << "cannot write to " << config.csv_out << "\n";
      return kExitValidation;
    }
    csv << result.csv;
  }
  if (result.exit_code != 0) {
    std::cerr << "error: see JSON output\n";
  }
  return result.exit_code;
}

}  // namespace dppca::cli
