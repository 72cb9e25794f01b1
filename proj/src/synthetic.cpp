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

#include "dppca/synthetic.hpp"

#include <cmath>
#include <vector>

#include "dppca/errors.hpp"
#include "dppca/rng.hpp"

namespace dppca {

void SyntheticSpec::validate() const {
  if (d < 2) throw ValidationError("synthetic spec needs d >= 2");
  if (!(gap > 0.0) || gap > 1.0) {
    throw ValidationError("synthetic gap must lie in (0, 1]");
  }
}

Eigen::VectorXd SyntheticSpec::population_spectrum() const {
  validate();
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(d);
  if (kind == SyntheticKind::kTwoPoint) {
    mu[0] = (1.0 + gap) / 2.0;
    mu[1] = (1.0 - gap) / 2.0;
  } else {
    const double dd = static_cast<double>(d);
    mu[0] = (gap * (dd - 1.0) + 1.0) / dd;
    const double rest = (1.0 - mu[0]) / (dd - 1.0);
    for (Eigen::Index j = 1; j < d; ++j) mu[j] = rest;
  }
  return mu;
}

double SyntheticSpec::population_risk(const Eigen::VectorXd& u) const {
  const Eigen::VectorXd mu = population_spectrum();
  if (u.size() != d) throw ValidationError("direction dimension mismatch");
  double value = 0.0;
  for (Eigen::Index j = 0; j < d; ++j) value += mu[j] * u[j] * u[j];
  return -value;
}

double SyntheticSpec::excess_risk(const Eigen::VectorXd& u) const {
  return population_risk(u) + population_spectrum()[0];
}

Dataset synth_generate(const SyntheticSpec& spec, Eigen::Index n,
                       std::uint64_t seed) {
  spec.validate();
  if (n < 1) throw ValidationError("synthetic sample size must be positive");
  Rng rng(seed);

  if (spec.kind == SyntheticKind::kTwoPoint) {
    const double p_top = (1.0 + spec.gap) / 2.0;
    std::vector<SparseRow> rows;
    rows.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index coord = rng.uniform01() <= p_top ? 0 : 1;
      rows.push_back(SparseRow{{coord, 1.0}});
    }
    return Dataset::from_sparse_rows(std::move(rows), spec.d);
  }

  const Eigen::VectorXd mu = spec.population_spectrum();
  Eigen::VectorXd amplitude(spec.d);
  for (Eigen::Index j = 0; j < spec.d; ++j) amplitude[j] = std::sqrt(mu[j]);
  std::vector<Eigen::VectorXd> points;
  points.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd x(spec.d);
    for (Eigen::Index j = 0; j < spec.d; ++j) x[j] = rng.sign() * amplitude[j];
    points.push_back(std::move(x));
  }
  return Dataset::from_points(std::move(points));
}

}  // namespace dppca
