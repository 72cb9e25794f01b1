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

#ifndef DPPCA_SENSITIVITY_HPP
#define DPPCA_SENSITIVITY_HPP

#include <cstdint>

namespace dppca {

// Pure mode draws heavy-tailed (Cauchy) noise and gives an epsilon-only
// guarantee; approximate mode draws Gaussian noise and spends a delta.
enum class PrivacyMode { kApprox, kPure };

// Sensitivity constant in the 1/(n * gap) local-sensitivity bound. The theory
// guarantees existence of a suitable constant without pinning its value, so
// it is an explicit parameter everywhere. kCalibratedSensitivityConstant in
// audit.hpp carries the empirically calibrated default used by the CLI.
inline constexpr double kDefaultSensitivityConstant = 1.0;

// Worst-case output change over arbitrary dataset pairs: the distance between
// two perpendicular unit directions, sqrt(2) in l2 and 2 in l1.
inline constexpr double kGlobalSensitivityL2 = 1.4142135623730951;
inline constexpr double kGlobalSensitivityL1 = 2.0;

struct PrivacyParams {
  double eps_p = 0.0;    // privacy budget, in (0, 1]
  double delta_p = 0.0;  // failure probability, in (0, 1); unused when pure
  PrivacyMode mode = PrivacyMode::kApprox;
  double c_sens = kDefaultSensitivityConstant;
  std::int64_t d = 0;    // ambient dimension

  static PrivacyParams approx(double eps_p, double delta_p, std::int64_t d,
                              double c_sens = kDefaultSensitivityConstant);
  static PrivacyParams pure(double eps_p, std::int64_t d,
                            double c_sens = kDefaultSensitivityConstant);

  void validate() const;
};

// Everything the noise calibration needs about one dataset: it depends on the
// data only through (n, gap). This restriction is what keeps the noise level
// itself from leaking more than the smoothness argument allows.
struct SensitivityProfile {
  std::int64_t n = 0;
  double gap = 0.0;
  double beta = 0.0;
  double ls_bound = 0.0;      // pointwise bound at edit distance 0
  double smooth_bound = 0.0;  // the beta-smooth envelope
  std::int64_t argmax_k = 0;  // edit distance attaining the envelope
  PrivacyMode mode = PrivacyMode::kApprox;
};

// Smoothness parameter for the mode's noise distribution:
// approximate: eps_p / (4 (d + ln(2/delta_p))); pure: eps_p / (6 d).
double compute_beta(const PrivacyParams& params);

// sqrt(2) for approximate (l2), 2 for pure (l1).
double global_sensitivity(PrivacyMode mode);

// Worst-case local-sensitivity bound over datasets within edit distance k:
// C_eff / (n * gap - k) while positive, the global sensitivity otherwise,
// and always clamped at the global sensitivity. C_eff is C in approximate
// mode and C sqrt(d) in pure mode.
double distance_k_sensitivity(std::int64_t n, double gap, std::int64_t k,
                              const PrivacyParams& params);

// Pointwise local-sensitivity bound; equals distance_k_sensitivity at k = 0.
double local_sensitivity_bound(std::int64_t n, double gap,
                               const PrivacyParams& params);

// The beta-smooth envelope max_k exp(-beta k) * distance_k_sensitivity,
// maximized exhaustively over integer k (values beyond the clamp index only
// decay, so the scan stops there). gap = 0 falls back to the global
// sensitivity with argmax 0.
SensitivityProfile smooth_sensitivity_profile(std::int64_t n, double gap,
                                              const PrivacyParams& params);

// Same, with the smoothness parameter supplied directly (test entry point).
SensitivityProfile smooth_sensitivity_profile_with_beta(
    std::int64_t n, double gap, double beta, PrivacyMode mode, double c_sens,
    std::int64_t d);

// Smallest n for which the smooth envelope provably drops below
// eps_g * eps_p / sqrt(d) (approximate) or eps_g * eps_p / d (pure), at the
// given empirical gap:
//   approximate: 2 C sqrt(d) / (gap eps_p eps_g)
//                + 8 (d + ln(2/delta_p)) ln(sqrt(2d)/(eps_p eps_g)) / (gap eps_p)
//   pure:        2 C d^{3/2} / (gap eps_p eps_g)
//                + 6 d ln(2d/(eps_p eps_g)) / (gap eps_p)
// rounded up to an integer. Requires gap > 0 and eps_g in (0, 1).
std::int64_t required_sample_size(double gap, double eps_g,
                                  const PrivacyParams& params);

}  // namespace dppca

#endif  // DPPCA_SENSITIVITY_HPP
