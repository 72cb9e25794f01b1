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

#ifndef DPPCA_PCA_HPP
#define DPPCA_PCA_HPP

#include <Eigen/Core>
#include <cstdint>

#include "dppca/dataset.hpp"

namespace dppca {

// Eigengaps below this are treated as zero and flagged as degenerate.
inline constexpr double kDegenerateGapTolerance = 1e-12;

// Dimension cap for materializing the covariance matrix.
inline constexpr Eigen::Index kDenseSpectrumDimensionCap = 500;

// Top eigenpairs of the empirical covariance. Holds k + 1 eigenvalues so the
// eigengap lambda_k - lambda_{k+1} is always available alongside the rank-k
// minimizer.
struct PcaSolution {
  Eigen::MatrixXd basis;        // d x k, orthonormal columns
  Eigen::VectorXd eigenvalues;  // k + 1 values, descending
  double gap = 0.0;             // eigenvalues[k-1] - eigenvalues[k], >= 0
  double residual = 0.0;        // max over pairs of ||C u - lambda u||
  bool degenerate_gap = false;  // gap fell below kDegenerateGapTolerance

  Eigen::Index dim() const { return basis.rows(); }
  Eigen::Index rank() const { return basis.cols(); }

  // Throws NumericalError if orthonormality or eigenvalue ordering is broken.
  void check_invariants() const;
};

struct SolverOptions {
  double tol = 1e-10;
  // 0 selects an automatic budget from the measured convergence rate, with a
  // hard floor of 1000 iterations per eigenpair.
  std::int64_t max_iter = 0;
  std::uint64_t seed = 0;
};

// Power iteration with deflation over covariance_apply; never materializes
// the covariance. Returns k + 1 eigenpairs (the extra one only as an
// eigenvalue via `eigenvalues`; `basis` has k columns). Requires 1 <= k < d.
// Throws NonConvergenceError with the best residual if the budget runs out.
PcaSolution solve_pca(const Dataset& data, Eigen::Index k,
                      const SolverOptions& options = {});

// Full spectrum of the materialized covariance, eigenvalues descending.
// Test/audit oracle; requires d <= dimension_cap.
struct DenseSpectrum {
  Eigen::VectorXd eigenvalues;  // d values, descending
  Eigen::MatrixXd eigenvectors; // columns match eigenvalues
};
DenseSpectrum dense_spectrum(
    const Dataset& data,
    Eigen::Index dimension_cap = kDenseSpectrumDimensionCap);

// The materialized covariance itself (same cap); used by the oracle and the
// covariance-perturbation baseline.
Eigen::MatrixXd materialize_covariance(
    const Dataset& data,
    Eigen::Index dimension_cap = kDenseSpectrumDimensionCap);

// -tr(U U^T C_hat) = -(1/n) sum_i ||U^T x_i||^2, in [-1, 0]. U must have
// orthonormal columns to 1e-8.
double empirical_risk(const Dataset& data, const Eigen::MatrixXd& basis);

// Distance between subspace representatives up to orthogonal alignment:
// min over k x k orthogonal W of ||U - V W||_F. For k = 1 this is
// min(||u - v||, ||u + v||).
double class_distance(const Eigen::MatrixXd& u, const Eigen::MatrixXd& v);

}  // namespace dppca

#endif  // DPPCA_PCA_HPP
