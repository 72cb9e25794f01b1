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

#ifndef DPPCA_RNG_HPP
#define DPPCA_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace dppca {

// splitmix64 finalizer; used as the fixed seed-splitting rule so that
// per-trial generators are independent and derivable from a master seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Child seed for sub-stream `index` of `master`. The rule is part of the
// reproducibility contract: aggregation over trials must not depend on the
// order in which the sub-streams are consumed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master + 0x9e3779b97f4a7c15ULL * (index + 1));
}

// Seeded generator with explicitly specified samplers. All distributions are
// computed from raw mt19937_64 output, not from std:: distribution adaptors,
// whose output sequences are implementation-defined. Identical seeds give
// identical draws on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on (0, 1]: ((x >> 11) + 1) * 2^-53.
  double uniform01() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  // Uniform on the open interval (0, 1), strictly centered.
  double uniform_open() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller (two uniforms per draw, no cached spare).
  double normal() {
    const double u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  // Standard Cauchy via inverse CDF: tan(pi * (v - 1/2)), v in (0, 1).
  double cauchy() {
    const double v = uniform_open();
    return std::tan(3.14159265358979323846 * (v - 0.5));
  }

  // Uniform sign in {+1, -1}.
  double sign() { return (engine_() & 1ULL) ? 1.0 : -1.0; }

  // Uniform integer in [0, bound) by rejection (bound > 0).
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

  // Generator for sub-stream `index`, independent of draws taken from *this.
  Rng child(std::uint64_t index) const { return Rng(derive_seed(seed_, index)); }

  std::uint64_t seed() const { return seed_; }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
};

}  // namespace dppca

#endif  // DPPCA_RNG_HPP
