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

#ifndef DARKZENO_OBSERVABLES_HPP
#define DARKZENO_OBSERVABLES_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Eigenvalues>

#include "darkzeno/core.hpp"
#include "darkzeno/hilbert.hpp"
#include "darkzeno/integrate.hpp"
#include "darkzeno/model.hpp"

namespace darkzeno {

inline constexpr double kDefaultStationarityEpsilon = 1e-12;

struct RetentionResult {
  double t_stab = 0.0;
  double p_ret = 0.0;
  bool converged = false;
  double terminal_residual = 0.0;  // ||L(rho(t_end))||_max, 0 when not evaluated
};

inline Eigen::VectorXd populations(const Operator& rho, const HilbertSpace& space) {
  if (rho.rows() != space.dim()) throw Error(ErrorCode::invalid_argument, "state does not match the space");
  return rho.diagonal().real();
}

inline Eigen::VectorXd populations(const DensityMatrix& rho, const HilbertSpace& space) {
  return populations(rho.matrix(), space);
}

/// <psi|rho|psi> for a normalized psi.
inline double fidelity_to_pure(const Operator& rho, const StateVector& psi) {
  if (psi.size() != rho.rows()) throw Error(ErrorCode::invalid_argument, "state vector does not match rho");
  if (std::abs(psi.norm() - 1.0) > 1e-8) throw Error(ErrorCode::invalid_input, "target state is not normalized");
  return (psi.adjoint() * rho * psi)(0, 0).real();
}

inline double fidelity_to_pure(const DensityMatrix& rho, const StateVector& psi) {
  return fidelity_to_pure(rho.matrix(), psi);
}

/// (1/2) sum |eig(a - b)| for Hermitian a, b.
inline double trace_distance(const Operator& a, const Operator& b) {
  const Operator d = a - b;
  Eigen::SelfAdjointEigenSolver<Operator> solver(0.5 * (d + d.adjoint()), Eigen::EigenvaluesOnly);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

namespace detail {

template <typename Vec>
std::size_t first_stable_record(const std::vector<Vec>& populations, double epsilon) {
  using Scalar = typename Vec::Scalar;
  const std::size_t n = populations.size();
  Vec hi = populations.back();
  Vec lo = hi;
  std::size_t first = n - 1;
  for (std::size_t i = n - 1; i-- > 0;) {
    const Vec& p = populations[i];
    const Scalar spread = std::max((hi - p).maxCoeff(), (p - lo).maxCoeff());
    if (!(spread < static_cast<Scalar>(epsilon))) break;
    first = i;
    hi = hi.cwiseMax(p);
    lo = lo.cwiseMin(p);
  }
  return first;
}

}  // namespace detail

/// Earliest recorded T with |P_a(t) - P_a(T)| < epsilon for every basis state a
/// and every later record t. Scans backward keeping the running extremes of the
/// later samples, stops at the last exit from the band and steps forward one
/// sample. converged is false when only the final sample qualifies. Uses the
/// extended-precision populations when the trajectory carries them.
inline RetentionResult stabilization_time(const TrajectoryRecord& traj, double epsilon = kDefaultStationarityEpsilon) {
  RetentionResult out;
  if (traj.empty()) return out;
  const std::size_t first = traj.precise_populations.size() == traj.size()
                                ? detail::first_stable_record(traj.precise_populations, epsilon)
                                : detail::first_stable_record(traj.populations, epsilon);
  out.t_stab = traj.times[first];
  out.converged = first + 1 < traj.size();
  return out;
}

/// As above, plus the terminal guard ||L(rho(t_end))||_max < 1e2 * epsilon.
inline RetentionResult stabilization_time(const TrajectoryRecord& traj, const Liouvillian& l,
                                          double epsilon = kDefaultStationarityEpsilon) {
  RetentionResult out = stabilization_time(traj, epsilon);
  if (traj.empty()) return out;
  out.terminal_residual = max_abs(l(traj.final_state));
  if (!(out.terminal_residual < 1e2 * epsilon)) out.converged = false;
  return out;
}

/// Dark weight at the record nearest to t_stab, clamped to [0, 1].
inline double retention(const TrajectoryRecord& traj, double t_stab) {
  if (traj.empty()) throw Error(ErrorCode::invalid_argument, "empty trajectory");
  const auto it = std::lower_bound(traj.times.begin(), traj.times.end(), t_stab);
  std::size_t i = static_cast<std::size_t>(it - traj.times.begin());
  if (i == traj.size()) {
    i = traj.size() - 1;
  } else if (i > 0 && t_stab - traj.times[i - 1] < traj.times[i] - t_stab) {
    --i;
  }
  return std::clamp(traj.dark_weight[i], 0.0, 1.0);
}

inline RetentionResult retention_result(const TrajectoryRecord& traj, const Liouvillian& l,
                                        double epsilon = kDefaultStationarityEpsilon) {
  RetentionResult out = stabilization_time(traj, l, epsilon);
  out.p_ret = retention(traj, out.t_stab);
  return out;
}

}  // namespace darkzeno

#endif  // DARKZENO_OBSERVABLES_HPP
