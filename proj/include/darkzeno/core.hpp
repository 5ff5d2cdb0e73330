// Copyright 2026 The darkzeno Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DARKZENO_CORE_HPP
#define DARKZENO_CORE_HPP

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace darkzeno {

using Complex = std::complex<double>;

/// Dense square matrix acting on a HilbertSpace (rows/cols follow its basis order).
using Operator = Eigen::MatrixXcd;

/// Amplitudes in the basis order of a HilbertSpace.
using StateVector = Eigen::VectorXcd;

inline constexpr Complex kI{0.0, 1.0};

enum class ErrorCode {
  invalid_truncation,
  index_out_of_range,
  invalid_argument,
  degenerate_couplings,
  division_by_zero,
  unphysical_temperature,
  invalid_input,
  integration_diverged,
  degenerate_state,
  degenerate_steady_state,
  no_interior_minimum,
  not_bracketed,
  empty_grid,
  parse_error,
  io_error,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_truncation: return "invalid-truncation";
    case ErrorCode::index_out_of_range: return "index";
    case ErrorCode::invalid_argument: return "argument";
    case ErrorCode::degenerate_couplings: return "degenerate-couplings";
    case ErrorCode::division_by_zero: return "division";
    case ErrorCode::unphysical_temperature: return "unphysical-temperature";
    case ErrorCode::invalid_input: return "input";
    case ErrorCode::integration_diverged: return "integration-diverged";
    case ErrorCode::degenerate_state: return "degenerate-state";
    case ErrorCode::degenerate_steady_state: return "degenerate-steady-state";
    case ErrorCode::no_interior_minimum: return "no-interior-minimum";
    case ErrorCode::not_bracketed: return "not-bracketed";
    case ErrorCode::empty_grid: return "empty-grid";
    case ErrorCode::parse_error: return "parse";
    case ErrorCode::io_error: return "io";
  }
  return "unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + " error: " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Largest entrywise modulus, the norm used by every tolerance in the library.
inline double max_abs(const Operator& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double hermiticity_deviation(const Operator& m) {
  return max_abs(m - m.adjoint());
}

inline Operator commutator(const Operator& a, const Operator& b) {
  return a * b - b * a;
}

}  // namespace darkzeno

#endif  // DARKZENO_CORE_HPP
