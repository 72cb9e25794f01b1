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

#include "dppca/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <set>
#include <sstream>

#include "dppca/errors.hpp"

namespace dppca {

namespace {

double parse_double(const std::string& token, const std::string& context) {
  std::size_t pos = 0;
  double value = 0.0;
  try {
    value = std::stod(token, &pos);
  } catch (const std::exception&) {
    throw ValidationError("malformed number '" + token + "' in " + context);
  }
  // Allow trailing whitespace only.
  for (std::size_t i = pos; i < token.size(); ++i) {
    if (!std::isspace(static_cast<unsigned char>(token[i]))) {
      throw ValidationError("malformed number '" + token + "' in " + context);
    }
  }
  if (!std::isfinite(value)) {
    throw ValidationError("non-finite value in " + context);
  }
  return value;
}

long long parse_integer(const std::string& token, const std::string& context) {
  std::size_t pos = 0;
  long long value = 0;
  try {
    value = std::stoll(token, &pos);
  } catch (const std::exception&) {
    throw ValidationError("malformed integer '" + token + "' in " + context);
  }
  if (pos != token.size()) {
    throw ValidationError("malformed integer '" + token + "' in " + context);
  }
  return value;
}

std::vector<Eigen::VectorXd> read_dense_csv(std::istream& in) {
  std::vector<Eigen::VectorXd> points;
  std::string line;
  Eigen::Index d = -1;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    // Skip blank lines (commonly a trailing newline).
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> values;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      values.push_back(
          parse_double(cell, "line " + std::to_string(lineno)));
    }
    if (values.empty()) {
      throw ValidationError("empty row at line " + std::to_string(lineno));
    }
    if (d < 0) {
      d = static_cast<Eigen::Index>(values.size());
    } else if (static_cast<Eigen::Index>(values.size()) != d) {
      throw ValidationError("inconsistent column count at line " +
                            std::to_string(lineno));
    }
    points.push_back(Eigen::Map<Eigen::VectorXd>(values.data(), d));
  }
  return points;
}

std::vector<SparseRow> read_sparse_coo(std::istream& in, Eigen::Index* n_out,
                                       Eigen::Index* d_out) {
  std::string line;
  if (!std::getline(in, line)) {
    throw ValidationError("empty sparse-coo file");
  }
  std::stringstream header(line);
  std::string tok_n, tok_d, tok_nnz, extra;
  if (!(header >> tok_n >> tok_d >> tok_nnz) || (header >> extra)) {
    throw ValidationError("sparse-coo header must be 'n d nnz'");
  }
  const long long n = parse_integer(tok_n, "header");
  const long long d = parse_integer(tok_d, "header");
  const long long nnz = parse_integer(tok_nnz, "header");
  if (n < 1 || d < 1 || nnz < 0) {
    throw ValidationError("sparse-coo header out of range");
  }

  std::vector<SparseRow> rows(static_cast<std::size_t>(n));
  std::set<std::pair<long long, long long>> seen;
  long long count = 0;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::stringstream ss(line);
    std::string tok_r, tok_c, tok_v;
    if (!(ss >> tok_r >> tok_c >> tok_v) || (ss >> extra)) {
      throw ValidationError("sparse-coo entry must be 'row col value' at line " +
                            std::to_string(lineno));
    }
    const long long r = parse_integer(tok_r, "line " + std::to_string(lineno));
    const long long c = parse_integer(tok_c, "line " + std::to_string(lineno));
    const double v = parse_double(tok_v, "line " + std::to_string(lineno));
    if (r < 0 || r >= n || c < 0 || c >= d) {
      throw ValidationError("sparse-coo index out of range at line " +
                            std::to_string(lineno));
    }
    if (!seen.insert({r, c}).second) {
      throw ValidationError("duplicate sparse-coo entry at line " +
                            std::to_string(lineno));
    }
    rows[static_cast<std::size_t>(r)].push_back(
        {static_cast<Eigen::Index>(c), v});
    ++count;
  }
  if (count != nnz) {
    throw ValidationError("sparse-coo nnz mismatch: header says " +
                          std::to_string(nnz) + ", file has " +
                          std::to_string(count));
  }
  for (auto& row : rows) {
    std::sort(row.begin(), row.end());
  }
  *n_out = static_cast<Eigen::Index>(n);
  *d_out = static_cast<Eigen::Index>(d);
  return rows;
}

double row_norm(const SparseRow& row) {
  double s = 0.0;
  for (const auto& [idx, value] : row) s += value * value;
  return std::sqrt(s);
}

}  // namespace

Dataset Dataset::from_points(std::vector<Eigen::VectorXd> points) {
  if (points.empty()) {
    throw ValidationError("dataset must contain at least one point");
  }
  Dataset ds;
  ds.sparse_ = false;
  ds.n_ = static_cast<Eigen::Index>(points.size());
  ds.d_ = points.front().size();
  ds.dense_rows_.resize(ds.n_, ds.d_);
  for (Eigen::Index i = 0; i < ds.n_; ++i) {
    if (points[static_cast<std::size_t>(i)].size() != ds.d_) {
      throw ValidationError("all points must share one dimension");
    }
    ds.dense_rows_.row(i) = points[static_cast<std::size_t>(i)].transpose();
  }
  ds.validate();
  return ds;
}

Dataset Dataset::from_sparse_rows(std::vector<SparseRow> rows,
                                  Eigen::Index d) {
  if (rows.empty()) {
    throw ValidationError("dataset must contain at least one point");
  }
  if (d < 1) {
    throw ValidationError("dimension must be at least 1");
  }
  Dataset ds;
  ds.sparse_ = true;
  ds.n_ = static_cast<Eigen::Index>(rows.size());
  ds.d_ = d;
  for (const auto& row : rows) {
    for (const auto& [idx, value] : row) {
      if (idx < 0 || idx >= d) {
        throw ValidationError("sparse coordinate out of range");
      }
      (void)value;
    }
  }
  ds.sparse_rows_ = std::move(rows);
  ds.validate();
  return ds;
}

void Dataset::validate() const {
  if (n_ < 1 || d_ < 1) {
    throw ValidationError("dataset must have n >= 1 and d >= 1");
  }
  for (Eigen::Index i = 0; i < n_; ++i) {
    const double norm =
        sparse_ ? row_norm(sparse_rows_[static_cast<std::size_t>(i)])
                : dense_rows_.row(i).norm();
    if (!(norm <= 1.0 + kUnitBallSlack)) {
      throw ValidationError("point " + std::to_string(i) +
                            " lies outside the unit ball (norm " +
                            std::to_string(norm) + ")");
    }
  }
}

Eigen::VectorXd Dataset::covariance_apply(const Eigen::VectorXd& v) const {
  if (v.size() != d_) {
    throw ValidationError("covariance_apply: vector has dimension " +
                          std::to_string(v.size()) + ", dataset has " +
                          std::to_string(d_));
  }
  Eigen::VectorXd result = Eigen::VectorXd::Zero(d_);
  if (!sparse_) {
    result.noalias() = dense_rows_.transpose() * (dense_rows_ * v);
  } else {
    for (const auto& row : sparse_rows_) {
      double dot = 0.0;
      for (const auto& [idx, value] : row) dot += value * v[idx];
      for (const auto& [idx, value] : row) result[idx] += value * dot;
    }
  }
  return result / static_cast<double>(n_);
}

double Dataset::covariance_trace() const {
  double total = 0.0;
  if (!sparse_) {
    total = dense_rows_.squaredNorm();
  } else {
    for (const auto& row : sparse_rows_) {
      for (const auto& [idx, value] : row) {
        (void)idx;
        total += value * value;
      }
    }
  }
  return total / static_cast<double>(n_);
}

Eigen::MatrixXd Dataset::covariance_matrix() const {
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d_, d_);
  if (!sparse_) {
    cov.noalias() = dense_rows_.transpose() * dense_rows_;
  } else {
    for (const auto& row : sparse_rows_) {
      for (const auto& [i, vi] : row) {
        for (const auto& [j, vj] : row) cov(i, j) += vi * vj;
      }
    }
  }
  return cov / static_cast<double>(n_);
}

Eigen::VectorXd Dataset::point(Eigen::Index i) const {
  if (i < 0 || i >= n_) {
    throw ValidationError("point index out of range");
  }
  if (!sparse_) return dense_rows_.row(i).transpose();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(d_);
  for (const auto& [idx, value] : sparse_rows_[static_cast<std::size_t>(i)]) {
    x[idx] = value;
  }
  return x;
}

std::vector<Eigen::VectorXd> Dataset::points_dense() const {
  std::vector<Eigen::VectorXd> out;
  out.reserve(static_cast<std::size_t>(n_));
  for (Eigen::Index i = 0; i < n_; ++i) out.push_back(point(i));
  return out;
}

Dataset Dataset::without_point(Eigen::Index i) const {
  if (n_ < 2) {
    throw ValidationError("cannot remove the only point");
  }
  auto points = points_dense();
  points.erase(points.begin() + i);
  return from_points(std::move(points));
}

Dataset Dataset::with_point(const Eigen::VectorXd& x) const {
  auto points = points_dense();
  points.push_back(x);
  return from_points(std::move(points));
}

Dataset ingest(const std::string& path, DatasetFormat format,
               ScalePolicy policy) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open input file: " + path);
  }

  if (format == DatasetFormat::kDenseCsv) {
    auto points = read_dense_csv(in);
    if (points.empty()) {
      throw ValidationError("empty dataset: " + path);
    }
    double max_norm = 0.0;
    for (const auto& p : points) max_norm = std::max(max_norm, p.norm());
    if (max_norm > 1.0 + kUnitBallSlack) {
      if (policy == ScalePolicy::kReject) {
        throw ValidationError("input point with norm " +
                              std::to_string(max_norm) +
                              " is outside the unit ball (policy: reject)");
      }
      for (auto& p : points) p /= max_norm;
    }
    return Dataset::from_points(std::move(points));
  }

  Eigen::Index n = 0;
  Eigen::Index d = 0;
  auto rows = read_sparse_coo(in, &n, &d);
  double max_norm = 0.0;
  for (const auto& row : rows) max_norm = std::max(max_norm, row_norm(row));
  if (max_norm > 1.0 + kUnitBallSlack) {
    if (policy == ScalePolicy::kReject) {
      throw ValidationError("input point with norm " +
                            std::to_string(max_norm) +
                            " is outside the unit ball (policy: reject)");
    }
    for (auto& row : rows) {
      for (auto& [idx, value] : row) value /= max_norm;
    }
  }
  return Dataset::from_sparse_rows(std::move(rows), d);
}

}  // namespace dppca
