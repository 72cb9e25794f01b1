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

#include "dppca/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dppca/errors.hpp"

namespace dppca {

PrivacyParams PrivacyParams::approx(double eps_p, double delta_p,
                                    std::int64_t d, double c_sens) {
  PrivacyParams p;
  p.eps_p = eps_p;
  p.delta_p = delta_p;
  p.mode = PrivacyMode::kApprox;
  p.c_sens = c_sens;
  p.d = d;
  p.validate();
  return p;
}

PrivacyParams PrivacyParams::pure(double eps_p, std::int64_t d,
                                  double c_sens) {
  PrivacyParams p;
  p.eps_p = eps_p;
  p.delta_p = 0.0;
  p.mode = PrivacyMode::kPure;
  p.c_sens = c_sens;
  p.d = d;
  p.validate();
  return p;
}

void PrivacyParams::validate() const {
  if (!(eps_p > 0.0) || eps_p > 1.0) {
    throw ValidationError("eps_p must lie in (0, 1]");
  }
  if (mode == PrivacyMode::kApprox &&
      (!(delta_p > 0.0) || !(delta_p < 1.0))) {
    throw ValidationError("delta_p must lie in (0, 1) in approximate mode");
  }
  if (!(c_sens > 0.0)) {
    throw ValidationError("sensitivity constant must be positive");
  }
  if (d < 1) {
    throw ValidationError("dimension must be at least 1");
  }
}

double compute_beta(const PrivacyParams& params) {
  params.validate();
  if (params.mode == PrivacyMode::kApprox) {
    return params.eps_p /
           (4.0 * (static_cast<double>(params.d) +
                   std::log(2.0 / params.delta_p)));
  }
  return params.eps_p / (6.0 * static_cast<double>(params.d));
}

double global_sensitivity(PrivacyMode mode) {
  return mode == PrivacyMode::kApprox ? kGlobalSensitivityL2
                                      : kGlobalSensitivityL1;
}

namespace {

double effective_constant(PrivacyMode mode, double c_sens, std::int64_t d) {
  return mode == PrivacyMode::kApprox
             ? c_sens
             : c_sens * std::sqrt(static_cast<double>(d));
}

double distance_k_raw(double n_gap, std::int64_t k, double c_eff,
                      double global) {
  const double slack = n_gap - static_cast<double>(k);
  if (slack > 0.0) {
    // The true local sensitivity never exceeds the global one, so the bound
    // is clamped; this also keeps the envelope finite near the branch edge.
    return std::min(c_eff / slack, global);
  }
  return global;
}

}  // namespace

double distance_k_sensitivity(std::int64_t n, double gap, std::int64_t k,
                              const PrivacyParams& params) {
  params.validate();
  if (k < 0) throw ValidationError("edit distance k must be non-negative");
  if (gap < 0.0) throw ValidationError("gap must be non-negative");
  const double c_eff = effective_constant(params.mode, params.c_sens, params.d);
  return distance_k_raw(static_cast<double>(n) * gap, k, c_eff,
                        global_sensitivity(params.mode));
}

double local_sensitivity_bound(std::int64_t n, double gap,
                               const PrivacyParams& params) {
  return distance_k_sensitivity(n, gap, 0, params);
}

SensitivityProfile smooth_sensitivity_profile_with_beta(
    std::int64_t n, double gap, double beta, PrivacyMode mode, double c_sens,
    std::int64_t d) {
  if (n < 1) throw ValidationError("sample size must be at least 1");
  if (gap < 0.0) throw ValidationError("gap must be non-negative");
  if (!(beta > 0.0)) throw ValidationError("beta must be positive");

  const double global = global_sensitivity(mode);
  const double c_eff = effective_constant(mode, c_sens, d);
  const double n_gap = static_cast<double>(n) * gap;

  SensitivityProfile profile;
  profile.n = n;
  profile.gap = gap;
  profile.beta = beta;
  profile.mode = mode;
  profile.ls_bound = distance_k_raw(n_gap, 0, c_eff, global);

  if (gap == 0.0) {
    profile.smooth_bound = global;
    profile.argmax_k = 0;
    return profile;
  }

  // Once n*gap - k <= 0 the per-k bound is the constant global sensitivity
  // and exp(-beta k) only decays, so the max lies at or before that index.
  std::int64_t scan_end = n;
  if (n_gap < static_cast<double>(n)) {
    const auto clamp_index =
        static_cast<std::int64_t>(std::ceil(n_gap));
    scan_end = std::min(scan_end, clamp_index);
  }

  double best = -1.0;
  std::int64_t best_k = 0;
  for (std::int64_t k = 0; k <= scan_end; ++k) {
    const double value =
        std::exp(-beta * static_cast<double>(k)) *
        distance_k_raw(n_gap, k, c_eff, global);
    if (value > best) {
      best = value;
      best_k = k;
    }
  }
  profile.smooth_bound = best;
  profile.argmax_k = best_k;
  return profile;
}

SensitivityProfile smooth_sensitivity_profile(std::int64_t n, double gap,
                                              const PrivacyParams& params) {
  return smooth_sensitivity_profile_with_beta(
      n, gap, compute_beta(params), params.mode, params.c_sens, params.d);
}

std::int64_t required_sample_size(double gap, double eps_g,
                                  const PrivacyParams& params) {
  params.validate();
  if (!(gap > 0.0)) {
    throw ValidationError("required_sample_size needs gap > 0");
  }
  if (!(eps_g > 0.0) || !(eps_g < 1.0)) {
    throw ValidationError("eps_g must lie in (0, 1)");
  }
  const double d = static_cast<double>(params.d);
  const double budget = params.eps_p * eps_g;
  double bound = 0.0;
  if (params.mode == PrivacyMode::kApprox) {
    bound = 2.0 * params.c_sens * std::sqrt(d) / (gap * budget) +
            8.0 * (d + std::log(2.0 / params.delta_p)) *
                std::log(std::sqrt(2.0 * d) / budget) / (gap * params.eps_p);
  } else {
    bound = 2.0 * params.c_sens * d * std::sqrt(d) / (gap * budget) +
            6.0 * d * std::log(2.0 * d / budget) / (gap * params.eps_p);
  }
  return static_cast<std::int64_t>(std::ceil(bound));
}

}  // namespace dppca
