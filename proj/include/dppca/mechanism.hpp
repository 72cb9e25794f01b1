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

#ifndef DPPCA_MECHANISM_HPP
#define DPPCA_MECHANISM_HPP

#include <Eigen/Core>
#include <cstdint>
#include <optional>

#include "dppca/dataset.hpp"
#include "dppca/pca.hpp"
#include "dppca/rng.hpp"
#include "dppca/sensitivity.hpp"

namespace dppca {

// Orientation randomization of the solver output. The solver's sign (or
// k x k frame) is arbitrary, so a deterministic choice could leak one bit;
// right-multiplying by a uniform orthogonal factor removes it while leaving
// the spanned subspace untouched.
struct Symmetrization {
  Eigen::MatrixXd aligned;     // basis * frame, d x k
  Eigen::MatrixXd frame;       // k x k orthogonal; [s] with s = +/-1 for k = 1
};
Symmetrization symmetrize_solution(const PcaSolution& solution, Rng& rng);

// Haar-uniform k x k orthogonal matrix: QR of a standard-normal matrix with
// the positive-diagonal sign convention on the triangular factor.
Eigen::MatrixXd haar_orthogonal(Eigen::Index k, Rng& rng);

struct NoiseDraw {
  Eigen::MatrixXd matrix;  // d x k
  double scale = 0.0;      // multiplier applied to the raw unit-scale draws
#ifndef DPPCA_DISABLE_TEST_HOOKS
  bool scale_overridden = false;
#endif
};

// Gaussian noise for approximate mode:
// scale = 5 U(S) sqrt(2 ln(2/delta_p)) / eps_p, entries iid scale * N(0,1).
NoiseDraw gaussian_noise_matrix(const SensitivityProfile& profile,
                                const PrivacyParams& params, Eigen::Index k,
                                Rng& rng);

// Cauchy noise for pure mode: scale = 6 U(S) / eps_p, entries iid
// scale * standard Cauchy (inverse-CDF sampling).
NoiseDraw cauchy_noise_matrix(const SensitivityProfile& profile,
                              const PrivacyParams& params, Eigen::Index k,
                              Rng& rng);

// QR re-orthonormalization of a full-column-rank d x k matrix; plain
// normalization when k = 1. Positive-diagonal convention on the triangular
// factor. Throws NumericalError when the input is rank deficient.
Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& m);

struct MechanismOptions {
  SolverOptions solver;
#ifndef DPPCA_DISABLE_TEST_HOOKS
  // Test hook: when set, replaces the calibrated noise scale (0 gives the
  // noiseless limit). Excluded from privacy-critical builds by defining
  // DPPCA_DISABLE_TEST_HOOKS.
  std::optional<double> noise_scale_override;
#endif
};

// Full trace of one mechanism run; enough to replay it given the seed.
struct MechanismRecord {
  PcaSolution solution;        // pre-noise solver output
  Eigen::MatrixXd frame;       // orientation factor (k x k orthogonal)
  Eigen::MatrixXd aligned;     // solution.basis * frame
  NoiseDraw noise;             // calibrated draw
  Eigen::MatrixXd output;      // orthonormalized private result, d x k
  SensitivityProfile profile;  // calibration inputs (n, gap) and the envelope
  std::uint64_t seed = 0;

  // Throws NumericalError if any structural invariant fails.
  void check_invariants(const PrivacyParams& params) const;
};

// Output-perturbation pipeline on a pre-computed solution: orientation
// randomization, calibrated noise, re-orthonormalization. The calibration
// sees the data only through (n, gap).
MechanismRecord perturb_solution(const PcaSolution& solution, std::int64_t n,
                                 const PrivacyParams& params,
                                 const MechanismOptions& options, Rng& rng);

// End-to-end differentially private PCA: solve, then perturb. Requires
// 1 <= k < d; params.d must equal the dataset dimension.
MechanismRecord private_pca(const Dataset& data, Eigen::Index k,
                            const PrivacyParams& params,
                            const MechanismOptions& options,
                            std::uint64_t seed);

}  // namespace dppca

#endif  // DPPCA_MECHANISM_HPP
