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

#ifndef DPPCA_ERRORS_HPP
#define DPPCA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dppca {

// Invalid configuration, parameters, or input data. CLI maps this to exit 2.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what)
      : std::invalid_argument(what) {}
};

// Numerical failure at runtime (non-convergence, rank deficiency, scale caps).
// CLI maps this to exit 3.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what)
      : std::runtime_error(what) {}
};

// Solver did not reach the requested residual; carries the best one achieved.
class NonConvergenceError : public NumericalError {
 public:
  NonConvergenceError(const std::string& what, double best_residual)
      : NumericalError(what), best_residual_(best_residual) {}

  double best_residual() const { return best_residual_; }

 private:
  double best_residual_;
};

}  // namespace dppca

#endif  // DPPCA_ERRORS_HPP
