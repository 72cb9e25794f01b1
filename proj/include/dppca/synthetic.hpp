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

#ifndef DPPCA_SYNTHETIC_HPP
#define DPPCA_SYNTHETIC_HPP

#include <Eigen/Core>
#include <cstdint>

#include "dppca/dataset.hpp"

namespace dppca {

// Families with an analytically known population covariance, top eigenvector
// e1, and prescribed top-two eigengap:
//   two-point: x = e1 with probability (1 + gap)/2, otherwise e2.
//   spiked:    x_j = s_j sqrt(mu_j) with iid random signs s_j, where
//              mu_1 = (gap (d-1) + 1)/d and the remaining mass is spread
//              evenly; every draw has unit norm and E[x x^T] = diag(mu).
enum class SyntheticKind { kTwoPoint, kSpiked };

struct SyntheticSpec {
  Eigen::Index d = 2;
  double gap = 0.5;  // population eigengap, in (0, 1]
  SyntheticKind kind = SyntheticKind::kTwoPoint;

  void validate() const;

  // Diagonal of the population covariance (descending).
  Eigen::VectorXd population_spectrum() const;

  // Population risk -u^T C u of a unit vector.
  double population_risk(const Eigen::VectorXd& u) const;

  // F(u) - F(e1) >= 0 for a unit vector u.
  double excess_risk(const Eigen::VectorXd& u) const;
};

// n iid draws. Two-point data is stored sparse (one nonzero per row), spiked
// data dense. Deterministic given the seed.
Dataset synth_generate(const SyntheticSpec& spec, Eigen::Index n,
                       std::uint64_t seed);

}  // namespace dppca

#endif  // DPPCA_SYNTHETIC_HPP
