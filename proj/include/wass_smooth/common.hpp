// Copyright 2026 The wass-smooth Authors
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

#ifndef WASS_SMOOTH_COMMON_HPP_
#define WASS_SMOOTH_COMMON_HPP_

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace wass_smooth {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Raised when an argument violates a documented precondition.
class InvalidInput : public std::invalid_argument {
 public:
  explicit InvalidInput(const std::string &what) : std::invalid_argument(what) {}
};

/// Raised when a functional lacks the derivative metadata an operation needs.
class UnsupportedFunctional : public std::runtime_error {
 public:
  explicit UnsupportedFunctional(const std::string &what)
      : std::runtime_error(what) {}
};

inline bool all_finite(const Eigen::Ref<const Matrix> &m) {
  return m.allFinite();
}

}  // namespace wass_smooth

#endif  // WASS_SMOOTH_COMMON_HPP_
