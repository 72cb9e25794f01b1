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

#include "dppca/mechanism.hpp"

#include <Eigen/QR>
#include <cmath>
#include <string>

#include "dppca/errors.hpp"

namespace dppca {

namespace {

constexpr double kRankDeficiencyTolerance = 1e-12;

// Column-major standard-normal fill; the fill order is part of the
// reproducibility contract.
Eigen::MatrixXd normal_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Eigen::MatrixXd z(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) z(i, j) = rng.normal();
  }
  return z;
}

Eigen::MatrixXd cauchy_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Eigen::MatrixXd z(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) z(i, j) = rng.cauchy();
  }
  return z;
}

// Thin QR with the positive-diagonal convention; returns Q only. Throws on
// rank deficiency.
Eigen::MatrixXd thin_qr_positive(const Eigen::MatrixXd& m) {
  const Eigen::Index k = m.cols();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  Eigen::MatrixXd q =
      qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), k);
  const Eigen::MatrixXd r =
      qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < k; ++j) {
    if (std::abs(r(j, j)) <= kRankDeficiencyTolerance) {
      throw NumericalError("QR input is rank deficient");
    }
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

double noise_scale(const SensitivityProfile& profile,
                   const PrivacyParams& params) {
  if (params.mode == PrivacyMode::kApprox) {
    return 5.0 * profile.smooth_bound *
           std::sqrt(2.0 * std::log(2.0 / params.delta_p)) / params.eps_p;
  }
  return 6.0 * profile.smooth_bound / params.eps_p;
}

}  // namespace

Eigen::MatrixXd haar_orthogonal(Eigen::Index k, Rng& rng) {
  if (k == 1) {
    Eigen::MatrixXd s(1, 1);
    s(0, 0) = rng.sign();
    return s;
  }
  return thin_qr_positive(normal_matrix(k, k, rng));
}

Symmetrization symmetrize_solution(const PcaSolution& solution, Rng& rng) {
  Symmetrization sym;
  sym.frame = haar_orthogonal(solution.rank(), rng);
  sym.aligned = solution.basis * sym.frame;
  return sym;
}

NoiseDraw gaussian_noise_matrix(const SensitivityProfile& profile,
                                const PrivacyParams& params, Eigen::Index k,
                                Rng& rng) {
  if (profile.mode != PrivacyMode::kApprox ||
      params.mode != PrivacyMode::kApprox) {
    throw ValidationError("gaussian noise requires approximate mode");
  }
  NoiseDraw draw;
  draw.scale = noise_scale(profile, params);
  draw.matrix = draw.scale * normal_matrix(params.d, k, rng);
  return draw;
}

NoiseDraw cauchy_noise_matrix(const SensitivityProfile& profile,
                              const PrivacyParams& params, Eigen::Index k,
                              Rng& rng) {
  if (profile.mode != PrivacyMode::kPure || params.mode != PrivacyMode::kPure) {
    throw ValidationError("cauchy noise requires pure mode");
  }
  NoiseDraw draw;
  draw.scale = noise_scale(profile, params);
  draw.matrix = draw.scale * cauchy_matrix(params.d, k, rng);
  return draw;
}

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& m) {
  if (m.cols() == 1) {
    const double norm = m.col(0).norm();
    if (norm <= kRankDeficiencyTolerance) {
      throw NumericalError("cannot normalize a (near-)zero vector");
    }
    return m / norm;
  }
  return thin_qr_positive(m);
}

void MechanismRecord::check_invariants(const PrivacyParams& params) const {
  const Eigen::Index k = output.cols();
  const Eigen::MatrixXd gram =
      output.transpose() * output - Eigen::MatrixXd::Identity(k, k);
  if (gram.cwiseAbs().maxCoeff() > 1e-10) {
    throw NumericalError("mechanism output lost orthonormality");
  }
  if ((aligned - solution.basis * frame).cwiseAbs().maxCoeff() != 0.0) {
    throw NumericalError("aligned matrix does not match basis * frame");
  }
  bool check_scale = true;
#ifndef DPPCA_DISABLE_TEST_HOOKS
  check_scale = !noise.scale_overridden;
#endif
  if (check_scale) {
    const double expected = noise_scale(profile, params);
    if (std::abs(noise.scale - expected) > 1e-12 * std::max(1.0, expected)) {
      throw NumericalError("recorded noise scale disagrees with the formula");
    }
  }
}

MechanismRecord perturb_solution(const PcaSolution& solution, std::int64_t n,
                                 const PrivacyParams& params,
                                 const MechanismOptions& options, Rng& rng) {
  params.validate();
  if (solution.dim() != params.d) {
    throw ValidationError("params.d does not match the solution dimension");
  }
  const Eigen::Index k = solution.rank();

  MechanismRecord record;
  record.solution = solution;
  record.profile = smooth_sensitivity_profile(n, solution.gap, params);

  Symmetrization sym = symmetrize_solution(solution, rng);
  record.frame = sym.frame;
  record.aligned = sym.aligned;

  const auto draw_noise = [&](Rng& r) {
    NoiseDraw draw = params.mode == PrivacyMode::kApprox
                         ? gaussian_noise_matrix(record.profile, params, k, r)
                         : cauchy_noise_matrix(record.profile, params, k, r);
#ifndef DPPCA_DISABLE_TEST_HOOKS
    if (options.noise_scale_override.has_value()) {
      const double target = *options.noise_scale_override;
      if (draw.scale > 0.0) {
        draw.matrix *= target / draw.scale;
      } else {
        draw.matrix.setZero();
      }
      draw.scale = target;
      draw.scale_overridden = true;
    }
#else
    (void)options;
#endif
    return draw;
  };

  record.noise = draw_noise(rng);
  try {
    record.output = orthonormalize(record.aligned + record.noise.matrix);
  } catch (const NumericalError&) {
    // Rank deficiency has probability zero under continuous noise; resample
    // once rather than apply a deterministic tie-break, which would bias the
    // output distribution.
    record.noise = draw_noise(rng);
    record.output = orthonormalize(record.aligned + record.noise.matrix);
  }

  record.check_invariants(params);
  return record;
}

MechanismRecord private_pca(const Dataset& data, Eigen::Index k,
                            const PrivacyParams& params,
                            const MechanismOptions& options,
                            std::uint64_t seed) {
  params.validate();
  if (params.d != data.dim()) {
    throw ValidationError("params.d does not match the dataset dimension");
  }
  SolverOptions solver = options.solver;
  solver.seed = derive_seed(seed, 0);
  const PcaSolution solution = solve_pca(data, k, solver);
  Rng mechanism_rng(derive_seed(seed, 1));
  MechanismRecord record =
      perturb_solution(solution, data.n(), params, options, mechanism_rng);
  record.seed = seed;
  return record;
}

}  // namespace dppca
