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

#ifndef DPPCA_DATASET_HPP
#define DPPCA_DATASET_HPP

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace dppca {

// Points may exceed unit norm by at most this much (rounding slack).
inline constexpr double kUnitBallSlack = 1e-12;

enum class DatasetFormat { kDenseCsv, kSparseCoo };
enum class ScalePolicy { kReject, kRescale };

// One sparse row as (coordinate, value) pairs, strictly increasing coordinate.
using SparseRow = std::vector<std::pair<Eigen::Index, double>>;

// Immutable sample of n points inside the d-dimensional unit ball. Covariance
// products are formed against the rows directly; the d x d covariance matrix
// is never materialized here. Safe for concurrent reads.
class Dataset {
 public:
  // Dense construction from explicit points (rows of `points`).
  static Dataset from_points(std::vector<Eigen::VectorXd> points);

  // Sparse construction; `d` is the ambient dimension.
  static Dataset from_sparse_rows(std::vector<SparseRow> rows, Eigen::Index d);

  Eigen::Index n() const { return n_; }
  Eigen::Index dim() const { return d_; }
  bool is_sparse() const { return sparse_; }

  // Applies the empirical second-moment matrix (1/n) sum_i x_i x_i^T to v.
  // Cost O(n d) dense, O(nnz) sparse.
  Eigen::VectorXd covariance_apply(const Eigen::VectorXd& v) const;

  // (1/n) sum_i ||x_i||^2; equals the trace of the covariance, at most 1.
  double covariance_trace() const;

  // Materializes (1/n) sum_i x_i x_i^T. O(n d^2); callers enforce their own
  // dimension caps.
  Eigen::MatrixXd covariance_matrix() const;

  // The i-th point as a dense vector.
  Eigen::VectorXd point(Eigen::Index i) const;

  // All points densified, in order.
  std::vector<Eigen::VectorXd> points_dense() const;

  // One-edit neighbors (used by the audit harness). Both return dense sets.
  Dataset without_point(Eigen::Index i) const;
  Dataset with_point(const Eigen::VectorXd& x) const;

 private:
  Dataset() = default;
  void validate() const;

  bool sparse_ = false;
  Eigen::Index n_ = 0;
  Eigen::Index d_ = 0;
  Eigen::MatrixXd dense_rows_;           // n x d when dense
  std::vector<SparseRow> sparse_rows_;   // n rows when sparse
};

// Reads a dataset from disk.
//
// dense-csv: one point per line, comma-separated decimals, no header.
// sparse-coo: header line "n d nnz", then nnz lines "row col value"
// (0-indexed). Duplicate (row, col) entries are rejected.
//
// Under ScalePolicy::kReject a row with norm above 1 (+slack) is an error;
// under kRescale every point is divided by the maximum norm when that
// maximum exceeds 1.
Dataset ingest(const std::string& path, DatasetFormat format,
               ScalePolicy policy = ScalePolicy::kReject);

}  // namespace dppca

#endif  // DPPCA_DATASET_HPP
