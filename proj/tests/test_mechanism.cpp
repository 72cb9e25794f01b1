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

#include <algorithm>
#include <cmath>
#include <vector>

#include "dppca/errors.hpp"
#include "dppca/mechanism.hpp"
#include "dppca/synthetic.hpp"
#include "test_util.hpp"

using namespace dppca;
using dppca::testing::basis_vector;

namespace {

PcaSolution unit_solution(Eigen::Index d, double top, double second,
                          int axis = 0) {
  PcaSolution sol;
  sol.basis = basis_vector(d, axis);
  sol.eigenvalues = Eigen::Vector2d(top, second);
  sol.gap = top - second;
  sol.residual = 0.0;
  return sol;
}

SensitivityProfile profile_with_bound(double bound, PrivacyMode mode) {
  SensitivityProfile profile;
  profile.n = 100;
  profile.gap = 0.5;
  profile.beta = 0.05;
  profile.ls_bound = bound;
  profile.smooth_bound = bound;
  profile.argmax_k = 0;
  profile.mode = mode;
  return profile;
}

// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j]) {
      ++i;
    } else {
      ++j;
    }
    const double fa = static_cast<double>(i) / static_cast<double>(a.size());
    const double fb = static_cast<double>(j) / static_cast<double>(b.size());
    d = std::max(d, std::abs(fa - fb));
  }
  return d;
}

}  // namespace

TEST_CASE("symmetrization flips the sign with frequency one half") {
  const PcaSolution sol = unit_solution(2, 0.75, 0.25);
  Rng rng(2024);
  int positives = 0;
  const int draws = 10000;
  for (int t = 0; t < draws; ++t) {
    const Symmetrization sym = symmetrize_solution(sol, rng);
    CHECK(std::abs(std::abs(sym.frame(0, 0)) - 1.0) <= 1e-15);
    if (sym.frame(0, 0) > 0.0) ++positives;
  }
  const double freq = static_cast<double>(positives) / draws;
  CHECK(freq == doctest::Approx(0.5).epsilon(0.04));  // 0.5 +/- 0.02
}

TEST_CASE("haar frame is orthogonal") {
  Rng rng(7);
  for (const Eigen::Index k : {2, 3, 5}) {
    const Eigen::MatrixXd q = haar_orthogonal(k, rng);
    const Eigen::MatrixXd gram =
        q.transpose() * q - Eigen::MatrixXd::Identity(k, k);
    CHECK(gram.cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("fixed seed gives a deterministic sign") {
  const PcaSolution sol = unit_solution(2, 0.75, 0.25);
  Rng a(55), b(55);
  const Symmetrization sa = symmetrize_solution(sol, a);
  const Symmetrization sb = symmetrize_solution(sol, b);
  CHECK(sa.frame(0, 0) == sb.frame(0, 0));
}

TEST_CASE("gaussian noise scale follows the formula") {
  const PrivacyParams params = PrivacyParams::approx(1.0, 0.01, 6);
  const SensitivityProfile profile =
      profile_with_bound(0.1, PrivacyMode::kApprox);
  Rng rng(3);
  const NoiseDraw draw = gaussian_noise_matrix(profile, params, 1, rng);
  CHECK(draw.scale ==
        doctest::Approx(0.5 * std::sqrt(2.0 * std::log(200.0)))
            .epsilon(1e-14));
  CHECK(draw.matrix.rows() == 6);
  CHECK(draw.matrix.cols() == 1);

  // Zero envelope (hypothetical) gives exactly zero noise.
  const NoiseDraw zero = gaussian_noise_matrix(
      profile_with_bound(0.0, PrivacyMode::kApprox), params, 1, rng);
  CHECK(zero.matrix.cwiseAbs().maxCoeff() == 0.0);

  // Mode mismatch is rejected.
  CHECK_THROWS_AS(
      gaussian_noise_matrix(profile_with_bound(0.1, PrivacyMode::kPure),
                            PrivacyParams::pure(1.0, 6), 1, rng),
      ValidationError);
}

TEST_CASE("gaussian per-entry deviation matches the scale empirically") {
  const PrivacyParams params = PrivacyParams::approx(1.0, 0.01, 1);
  const SensitivityProfile profile =
      profile_with_bound(0.1, PrivacyMode::kApprox);
  Rng rng(11);
  const int draws = 100000;
  double sum_sq = 0.0;
  double scale = 0.0;
  for (int t = 0; t < draws; ++t) {
    const NoiseDraw draw = gaussian_noise_matrix(profile, params, 1, rng);
    scale = draw.scale;
    sum_sq += draw.matrix(0, 0) * draw.matrix(0, 0);
  }
  const double sd = std::sqrt(sum_sq / draws);
  CHECK(sd == doctest::Approx(scale).epsilon(0.01));
}

TEST_CASE("cauchy noise scale and tail behavior") {
  const PrivacyParams params = PrivacyParams::pure(0.5, 4);
  const SensitivityProfile profile =
      profile_with_bound(0.1, PrivacyMode::kPure);
  Rng rng(5);
  const NoiseDraw draw = cauchy_noise_matrix(profile, params, 2, rng);
  CHECK(draw.scale == doctest::Approx(1.2).epsilon(1e-14));
  CHECK(draw.matrix.cols() == 2);

  CHECK_THROWS_AS(
      cauchy_noise_matrix(profile_with_bound(0.1, PrivacyMode::kApprox),
                          PrivacyParams::approx(1.0, 0.01, 4), 1, rng),
      ValidationError);
}

TEST_CASE("cauchy sampler: unit median of the absolute value") {
  Rng rng(17);
  const int draws = 100000;
  std::vector<double> abs_values;
  abs_values.reserve(draws);
  for (int t = 0; t < draws; ++t) abs_values.push_back(std::abs(rng.cauchy()));
  std::nth_element(abs_values.begin(), abs_values.begin() + draws / 2,
                   abs_values.end());
  CHECK(abs_values[draws / 2] == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("cauchy stability: the scaled sum keeps a unit median") {
  Rng rng(19);
  const int draws = 100000;
  const int d = 10;
  std::vector<double> stats;
  stats.reserve(draws);
  for (int t = 0; t < draws; ++t) {
    double sum = 0.0;
    for (int i = 0; i < d; ++i) sum += rng.cauchy();
    stats.push_back(std::abs(sum) / d);
  }
  std::nth_element(stats.begin(), stats.begin() + draws / 2, stats.end());
  CHECK(stats[draws / 2] == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("orthonormalize") {
  Eigen::MatrixXd m(3, 1);
  m << 3.0, 4.0, 0.0;
  const Eigen::MatrixXd q = orthonormalize(m);
  CHECK(q(0, 0) == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(q(1, 0) == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(q(2, 0) == doctest::Approx(0.0).epsilon(1e-14));

  SUBCASE("already orthonormal input is unchanged") {
    Rng rng(23);
    Eigen::MatrixXd g(5, 2);
    for (Eigen::Index j = 0; j < 2; ++j) {
      for (Eigen::Index i = 0; i < 5; ++i) g(i, j) = rng.normal();
    }
    const Eigen::MatrixXd base = orthonormalize(g);
    const Eigen::MatrixXd again = orthonormalize(base);
    CHECK((again - base).cwiseAbs().maxCoeff() <= 1e-12);
  }

  SUBCASE("QR identity on a random matrix") {
    Rng rng(29);
    Eigen::MatrixXd g(20, 3);
    for (Eigen::Index j = 0; j < 3; ++j) {
      for (Eigen::Index i = 0; i < 20; ++i) g(i, j) = rng.normal();
    }
    const Eigen::MatrixXd q = orthonormalize(g);
    const Eigen::MatrixXd gram =
        q.transpose() * q - Eigen::MatrixXd::Identity(3, 3);
    CHECK(gram.cwiseAbs().maxCoeff() <= 1e-10);
    // span(Q) = span(M): projecting M onto Q reproduces M.
    CHECK((q * (q.transpose() * g) - g).cwiseAbs().maxCoeff() <= 1e-10);
  }

  SUBCASE("rank-deficient input is an error") {
    Eigen::MatrixXd deficient(4, 2);
    deficient.col(0) = basis_vector(4, 0);
    deficient.col(1) = basis_vector(4, 0);
    CHECK_THROWS_AS(orthonormalize(deficient), NumericalError);
    CHECK_THROWS_AS(orthonormalize(Eigen::MatrixXd::Zero(3, 1)),
                    NumericalError);
  }
}

#ifndef DPPCA_DISABLE_TEST_HOOKS
TEST_CASE("noiseless limit returns the solver output up to sign") {
  const SyntheticSpec spec{4, 0.5, SyntheticKind::kTwoPoint};
  const Dataset data = synth_generate(spec, 50, 31);
  const PrivacyParams params = PrivacyParams::approx(1.0, 0.01, 4);
  MechanismOptions options;
  options.noise_scale_override = 0.0;
  const MechanismRecord record = private_pca(data, 1, params, options, 77);
  const double align = std::abs(record.output.col(0).dot(
      record.solution.basis.col(0)));
  CHECK(align == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(record.noise.matrix.cwiseAbs().maxCoeff() == 0.0);
}
#endif  // DPPCA_DISABLE_TEST_HOOKS

TEST_CASE("private output is orthonormal in every run") {
  const SyntheticSpec spec{6, 0.4, SyntheticKind::kSpiked};
  const Dataset data = synth_generate(spec, 80, 13);
  for (const bool pure : {false, true}) {
    const PrivacyParams params =
        pure ? PrivacyParams::pure(0.8, 6)
             : PrivacyParams::approx(0.8, 0.01, 6);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const MechanismRecord record =
          private_pca(data, 2, params, {}, seed);
      const Eigen::MatrixXd gram =
          record.output.transpose() * record.output -
          Eigen::MatrixXd::Identity(2, 2);
      CHECK(gram.cwiseAbs().maxCoeff() <= 1e-10);
      // Recorded scale equals the formula recomputed from the profile.
      const double expected =
          pure ? 6.0 * record.profile.smooth_bound / params.eps_p
               : 5.0 * record.profile.smooth_bound *
                     std::sqrt(2.0 * std::log(2.0 / params.delta_p)) /
                     params.eps_p;
      CHECK(std::abs(record.noise.scale - expected) <= 1e-12);
    }
  }
}

TEST_CASE("pipeline is reproducible for a fixed seed") {
  const SyntheticSpec spec{5, 0.6, SyntheticKind::kSpiked};
  const Dataset data = synth_generate(spec, 60, 3);
  const PrivacyParams params = PrivacyParams::approx(0.9, 0.02, 5);
  const MechanismRecord a = private_pca(data, 1, params, {}, 123);
  const MechanismRecord b = private_pca(data, 1, params, {}, 123);
  CHECK((a.output - b.output).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.noise.matrix - b.noise.matrix).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.frame(0, 0) == b.frame(0, 0));
  CHECK(a.noise.scale == b.noise.scale);
  const MechanismRecord c = private_pca(data, 1, params, {}, 124);
  CHECK((a.noise.matrix - c.noise.matrix).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("planted direction survives the mechanism at desk scale") {
  const SyntheticSpec spec{10, 0.5, SyntheticKind::kTwoPoint};
  const PrivacyParams params = PrivacyParams::approx(1.0, 1e-3, 10);
  int hits = 0;
  for (int run = 0; run < 100; ++run) {
    const Dataset data =
        synth_generate(spec, 10000, derive_seed(900, 2 * run));
    const MechanismRecord record =
        private_pca(data, 1, params, {}, derive_seed(900, 2 * run + 1));
    if (std::abs(record.output(0, 0)) >= 0.99) ++hits;
  }
  CHECK(hits >= 90);
}

TEST_CASE("input sign does not shift the output distribution") {
  const PcaSolution plus = unit_solution(2, 0.75, 0.25);
  PcaSolution minus = plus;
  minus.basis = -minus.basis;
  const PrivacyParams params = PrivacyParams::approx(1.0, 0.05, 2);

  const auto collect = [&](const PcaSolution& sol, std::uint64_t seed) {
    std::vector<double> xs;
    const int trials = 10000;
    xs.reserve(trials);
    for (int t = 0; t < trials; ++t) {
      Rng rng(derive_seed(seed, t));
      const MechanismRecord record =
          perturb_solution(sol, 40, params, {}, rng);
      xs.push_back(record.output(0, 0));
    }
    return xs;
  };

  const double d = ks_statistic(collect(plus, 1), collect(minus, 2));
  // Two-sample KS critical value at p = 0.01 for n = m = 1e4.
  const double critical = 1.628 * std::sqrt(2.0 / 10000.0);
  CHECK(d <= critical);
}
