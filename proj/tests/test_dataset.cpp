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

#include <cmath>

#include "dppca/dataset.hpp"
#include "dppca/errors.hpp"
#include "dppca/rng.hpp"
#include "test_util.hpp"

using namespace dppca;
using dppca::testing::TempFile;

TEST_CASE("dense csv ingest parses unit vectors") {
  TempFile file("1,0\n0,1\n");
  const Dataset ds = ingest(file.path(), DatasetFormat::kDenseCsv);
  CHECK(ds.n() == 2);
  CHECK(ds.dim() == 2);
  CHECK(ds.point(0)[0] == 1.0);
  CHECK(ds.point(1)[1] == 1.0);
}

TEST_CASE("rescale policy divides by the max norm") {
  TempFile file("3,4\n0.3,0\n");
  const Dataset ds =
      ingest(file.path(), DatasetFormat::kDenseCsv, ScalePolicy::kRescale);
  CHECK(ds.point(0)[0] == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(ds.point(0)[1] == doctest::Approx(0.8).epsilon(1e-14));
  // The other row is rescaled by the same factor.
  CHECK(ds.point(1)[0] == doctest::Approx(0.06).epsilon(1e-14));
}

TEST_CASE("reject policy errors on out-of-ball rows") {
  TempFile file("3,4\n");
  CHECK_THROWS_AS(ingest(file.path(), DatasetFormat::kDenseCsv),
                  ValidationError);
}

TEST_CASE("malformed and empty files are rejected") {
  TempFile bad_number("1,banana\n");
  CHECK_THROWS_AS(ingest(bad_number.path(), DatasetFormat::kDenseCsv),
                  ValidationError);
  TempFile ragged("1,0\n0.5\n");
  CHECK_THROWS_AS(ingest(ragged.path(), DatasetFormat::kDenseCsv),
                  ValidationError);
  TempFile empty("");
  CHECK_THROWS_AS(ingest(empty.path(), DatasetFormat::kDenseCsv),
                  ValidationError);
  CHECK_THROWS_AS(ingest("/nonexistent/file.csv", DatasetFormat::kDenseCsv),
                  ValidationError);
}

TEST_CASE("sparse coo ingest") {
  TempFile file("2 3 3\n0 0 1\n1 1 0.6\n1 2 0.8\n");
  const Dataset ds = ingest(file.path(), DatasetFormat::kSparseCoo);
  CHECK(ds.is_sparse());
  CHECK(ds.n() == 2);
  CHECK(ds.dim() == 3);
  CHECK(ds.point(1)[1] == doctest::Approx(0.6));
  CHECK(ds.point(1)[2] == doctest::Approx(0.8));

  SUBCASE("nnz mismatch") {
    TempFile bad("2 3 5\n0 0 1\n1 1 0.6\n1 2 0.8\n");
    CHECK_THROWS_AS(ingest(bad.path(), DatasetFormat::kSparseCoo),
                    ValidationError);
  }
  SUBCASE("duplicate entry") {
    TempFile bad("2 3 3\n0 0 1\n0 0 0.5\n1 1 0.6\n");
    CHECK_THROWS_AS(ingest(bad.path(), DatasetFormat::kSparseCoo),
                    ValidationError);
  }
  SUBCASE("index out of range") {
    TempFile bad("2 3 1\n0 7 1\n");
    CHECK_THROWS_AS(ingest(bad.path(), DatasetFormat::kSparseCoo),
                    ValidationError);
  }
  SUBCASE("rescale applies to sparse values") {
    TempFile big("1 2 2\n0 0 3\n0 1 4\n");
    const Dataset scaled =
        ingest(big.path(), DatasetFormat::kSparseCoo, ScalePolicy::kRescale);
    CHECK(scaled.point(0)[0] == doctest::Approx(0.6).epsilon(1e-14));
    CHECK(scaled.point(0)[1] == doctest::Approx(0.8).epsilon(1e-14));
  }
}

TEST_CASE("covariance_apply on axis-aligned data") {
  const Eigen::Index d = 2;
  const Dataset ds = Dataset::from_points(
      {testing::basis_vector(d, 0), testing::basis_vector(d, 1)});
  const Eigen::VectorXd out = ds.covariance_apply(Eigen::Vector2d(1.0, 1.0));
  CHECK(out[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(out[1] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("covariance_apply annihilates orthogonal directions") {
  const Eigen::Index d = 4;
  const Dataset ds = Dataset::from_points({testing::basis_vector(d, 0),
                                           testing::basis_vector(d, 0),
                                           testing::basis_vector(d, 0)});
  const Eigen::VectorXd out = ds.covariance_apply(testing::basis_vector(d, 1));
  CHECK(out.norm() == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("dimension mismatch is rejected") {
  const Dataset ds = Dataset::from_points({testing::basis_vector(2, 0)});
  CHECK_THROWS_AS(ds.covariance_apply(Eigen::VectorXd::Ones(3)),
                  ValidationError);
}

TEST_CASE("sparse apply matches a dense oracle") {
  // Random sparse data, ~5% fill, n=50, d=20.
  Rng rng(41);
  const Eigen::Index n = 50, d = 20;
  std::vector<SparseRow> rows;
  for (Eigen::Index i = 0; i < n; ++i) {
    SparseRow row;
    for (Eigen::Index j = 0; j < d; ++j) {
      if (rng.uniform01() < 0.05) row.push_back({j, 2.0 * rng.uniform01() - 1.0});
    }
    if (row.empty()) row.push_back({static_cast<Eigen::Index>(i % d), 0.5});
    double norm = 0.0;
    for (auto& [idx, v] : row) norm += v * v;
    norm = std::sqrt(norm);
    if (norm > 1.0) {
      for (auto& [idx, v] : row) v /= norm;
    }
    rows.push_back(std::move(row));
  }
  const Dataset sparse = Dataset::from_sparse_rows(rows, d);
  const Dataset dense = Dataset::from_points(sparse.points_dense());

  const Eigen::MatrixXd cov = dense.covariance_matrix();
  for (int rep = 0; rep < 5; ++rep) {
    Eigen::VectorXd v(d);
    for (Eigen::Index j = 0; j < d; ++j) v[j] = rng.normal();
    const Eigen::VectorXd via_sparse = sparse.covariance_apply(v);
    const Eigen::VectorXd via_dense = dense.covariance_apply(v);
    const Eigen::VectorXd oracle = cov * v;
    CHECK((via_sparse - oracle).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((via_sparse - via_dense).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("covariance_apply is linear") {
  const Dataset ds = testing::random_ball_dataset(40, 8, 7);
  Rng rng(8);
  for (int rep = 0; rep < 10; ++rep) {
    const Eigen::VectorXd u = testing::random_unit(8, rng);
    const Eigen::VectorXd v = testing::random_unit(8, rng);
    const double a = rng.normal();
    const double b = rng.normal();
    const Eigen::VectorXd lhs = ds.covariance_apply(a * u + b * v);
    const Eigen::VectorXd rhs =
        a * ds.covariance_apply(u) + b * ds.covariance_apply(v);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("covariance is positive semidefinite with trace at most 1") {
  const Dataset ds = testing::random_ball_dataset(60, 6, 11);
  Rng rng(12);
  for (int rep = 0; rep < 20; ++rep) {
    const Eigen::VectorXd v = testing::random_unit(6, rng);
    CHECK(v.dot(ds.covariance_apply(v)) >= -1e-12);
  }
  CHECK(ds.covariance_trace() <= 1.0 + 1e-12);
}

TEST_CASE("duplicate rows are permitted") {
  const Eigen::VectorXd e1 = testing::basis_vector(2, 0);
  const Dataset ds = Dataset::from_points({e1, e1, e1});
  CHECK(ds.n() == 3);
  CHECK(ds.covariance_trace() == doctest::Approx(1.0));
}

TEST_CASE("neighbor construction") {
  const Dataset ds = Dataset::from_points(
      {testing::basis_vector(2, 0), testing::basis_vector(2, 1)});
  const Dataset removed = ds.without_point(0);
  CHECK(removed.n() == 1);
  CHECK(removed.point(0)[1] == 1.0);
  const Dataset added = ds.with_point(Eigen::Vector2d(0.6, 0.8));
  CHECK(added.n() == 3);
  CHECK_THROWS_AS(ds.with_point(Eigen::Vector2d(3.0, 4.0)), ValidationError);
}
