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

#include "dppca/pca.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include "dppca/errors.hpp"
#include "dppca/rng.hpp"

namespace dppca {

namespace {

constexpr std::int64_t kIterationFloor = 1000;
constexpr std::int64_t kIterationHardCap = 200000;
constexpr std::int64_t kRateWindow = 100;

// Removes the components of v along the first `count` columns of basis.
void project_out(const Eigen::MatrixXd& basis, Eigen::Index count,
                 Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < count; ++i) {
    v -= basis.col(i) * basis.col(i).dot(v);
  }
}

struct PowerResult {
  Eigen::VectorXd vector;
  double value = 0.0;
  double residual = 0.0;
};

// Power iteration for the leading eigenpair of the covariance restricted to
// the orthogonal complement of the first `deflated` columns of `basis`.
PowerResult power_iterate(const Dataset& data, const Eigen::MatrixXd& basis,
                          const Eigen::VectorXd& values, Eigen::Index deflated,
                          double tol, std::int64_t max_iter, Rng rng) {
  const Eigen::Index d = data.dim();

  Eigen::VectorXd v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = rng.normal();
  project_out(basis, deflated, v);
  while (v.norm() < 1e-8) {  // start vector fell inside the deflated span
    for (Eigen::Index i = 0; i < d; ++i) v[i] = rng.normal();
    project_out(basis, deflated, v);
  }
  v.normalize();

  const bool auto_budget = max_iter == 0;
  std::int64_t budget = auto_budget ? kIterationFloor : max_iter;
  bool extended = false;

  double best_residual = std::numeric_limits<double>::infinity();
  double window_residual = best_residual;

  for (std::int64_t t = 0;; ++t) {
    Eigen::VectorXd w = data.covariance_apply(v);
    for (Eigen::Index i = 0; i < deflated; ++i) {
      w -= values[i] * basis.col(i) * basis.col(i).dot(v);
    }
    const double lambda = v.dot(w);
    const double residual = (w - lambda * v).norm();
    best_residual = std::min(best_residual, residual);
    if (residual <= tol) {
      return PowerResult{v, lambda, residual};
    }

    if (t + 1 >= budget) {
      if (auto_budget && !extended) {
        // One budget extension from the measured contraction rate; the
        // relative-gap proxy is floored at 1e-3 to avoid runaway budgets.
        double gap_estimate = 1e-3;
        if (window_residual > 0.0 && residual < window_residual) {
          const double rate = std::pow(residual / window_residual,
                                       1.0 / static_cast<double>(kRateWindow));
          gap_estimate = std::max(gap_estimate, -std::log(rate));
        }
        const double need =
            10.0 * std::ceil(std::log(static_cast<double>(d) / tol) /
                             gap_estimate);
        budget = std::min<std::int64_t>(
            kIterationHardCap,
            std::max<std::int64_t>(kIterationFloor,
                                   static_cast<std::int64_t>(need)));
        extended = true;
        if (t + 1 < budget) continue;
      }
      throw NonConvergenceError(
          "power iteration did not reach tol=" + std::to_string(tol) +
              " within " + std::to_string(budget) +
              " iterations (best residual " + std::to_string(best_residual) +
              ")",
          best_residual);
    }
    if (t % kRateWindow == 0) window_residual = residual;

    project_out(basis, deflated, w);
    const double norm = w.norm();
    if (norm < 1e-300) {
      // Operator vanishes on the complement: v is an eigenvector with
      // eigenvalue ~0 and the residual check above would have caught it,
      // unless tol is below the attainable precision.
      throw NonConvergenceError(
          "deflated operator vanished before reaching tol", best_residual);
    }
    v = w / norm;
  }
}

}  // namespace

void PcaSolution::check_invariants() const {
  const Eigen::Index k = rank();
  const Eigen::MatrixXd gram =
      basis.transpose() * basis - Eigen::MatrixXd::Identity(k, k);
  if (gram.cwiseAbs().maxCoeff() > 1e-10) {
    throw NumericalError("PCA basis lost orthonormality");
  }
  if (eigenvalues.size() != k + 1) {
    throw NumericalError("PCA solution must carry k+1 eigenvalues");
  }
  for (Eigen::Index i = 0; i + 1 < eigenvalues.size(); ++i) {
    if (eigenvalues[i] + 1e-12 < eigenvalues[i + 1]) {
      throw NumericalError("eigenvalues are not sorted descending");
    }
  }
  if (eigenvalues.minCoeff() < 0.0 || eigenvalues.maxCoeff() > 1.0 + 1e-9) {
    throw NumericalError("eigenvalues outside [0, 1]");
  }
  if (gap < 0.0) {
    throw NumericalError("negative eigengap");
  }
}

PcaSolution solve_pca(const Dataset& data, Eigen::Index k,
                      const SolverOptions& options) {
  const Eigen::Index d = data.dim();
  if (k < 1 || k >= d) {
    throw ValidationError("rank k must satisfy 1 <= k < d");
  }
  if (!(options.tol > 0.0)) {
    throw ValidationError("solver tolerance must be positive");
  }
  if (options.max_iter < 0) {
    throw ValidationError("max_iter must be non-negative");
  }

  const Eigen::Index pairs = k + 1;
  Eigen::MatrixXd vectors(d, pairs);
  Eigen::VectorXd values(pairs);
  double worst_residual = 0.0;

  Rng master(options.seed);
  for (Eigen::Index j = 0; j < pairs; ++j) {
    PowerResult res =
        power_iterate(data, vectors, values, j, options.tol, options.max_iter,
                      master.child(static_cast<std::uint64_t>(j)));
    vectors.col(j) = res.vector;
    values[j] = res.value;
    worst_residual = std::max(worst_residual, res.residual);
  }

  // Deflation returns eigenvalues nearly descending; ties can invert within
  // solver precision, so order explicitly.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(pairs));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return values[a] > values[b];
  });

  PcaSolution sol;
  sol.basis.resize(d, k);
  sol.eigenvalues.resize(pairs);
  for (Eigen::Index j = 0; j < pairs; ++j) {
    const Eigen::Index src = order[static_cast<std::size_t>(j)];
    sol.eigenvalues[j] = std::max(0.0, values[src]);
    if (values[src] < -1e-10) {
      throw NumericalError("covariance produced a significantly negative "
                           "eigenvalue estimate");
    }
    if (j < k) sol.basis.col(j) = vectors.col(src);
  }
  sol.residual = worst_residual;
  sol.gap = sol.eigenvalues[k - 1] - sol.eigenvalues[k];
  if (sol.gap < kDegenerateGapTolerance) {
    sol.gap = 0.0;
    sol.degenerate_gap = true;
  }
  sol.check_invariants();
  return sol;
}

Eigen::MatrixXd materialize_covariance(const Dataset& data,
                                       Eigen::Index dimension_cap) {
  if (data.dim() > dimension_cap) {
    throw ValidationError("dimension " + std::to_string(data.dim()) +
                          " exceeds the dense materialization cap " +
                          std::to_string(dimension_cap));
  }
  return data.covariance_matrix();
}

DenseSpectrum dense_spectrum(const Dataset& data, Eigen::Index dimension_cap) {
  const Eigen::MatrixXd cov = materialize_covariance(data, dimension_cap);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("dense eigendecomposition failed");
  }
  const Eigen::Index d = data.dim();
  DenseSpectrum spectrum;
  spectrum.eigenvalues.resize(d);
  spectrum.eigenvectors.resize(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    spectrum.eigenvalues[i] = solver.eigenvalues()[d - 1 - i];
    spectrum.eigenvectors.col(i) = solver.eigenvectors().col(d - 1 - i);
  }
  return spectrum;
}

double empirical_risk(const Dataset& data, const Eigen::MatrixXd& basis) {
  if (basis.rows() != data.dim()) {
    throw ValidationError("basis dimension does not match dataset");
  }
  const Eigen::Index k = basis.cols();
  const Eigen::MatrixXd gram =
      basis.transpose() * basis - Eigen::MatrixXd::Identity(k, k);
  if (gram.cwiseAbs().maxCoeff() > 1e-8) {
    throw ValidationError("empirical_risk requires orthonormal columns");
  }
  double risk = 0.0;
  for (Eigen::Index j = 0; j < k; ++j) {
    risk -= basis.col(j).dot(data.covariance_apply(basis.col(j)));
  }
  return risk;
}

double class_distance(const Eigen::MatrixXd& u, const Eigen::MatrixXd& v) {
  if (u.rows() != v.rows() || u.cols() != v.cols()) {
    throw ValidationError("class_distance requires equal shapes");
  }
  const Eigen::Index k = u.cols();
  if (k == 1) {
    return std::min((u - v).norm(), (u + v).norm());
  }
  // Orthogonal Procrustes: min_W ||U - V W||_F^2 = 2k - 2 ||V^T U||_*.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(v.transpose() * u);
  const double nuclear = svd.singularValues().sum();
  return std::sqrt(std::max(0.0, 2.0 * static_cast<double>(k) - 2.0 * nuclear));
}

}  // namespace dppca
