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

// Truncated photon x atom x atom product basis and the elementary operators
// acting on it.
//
// Basis order is photon-major, then atom 1, then atom 2:
//   |0,00>, |0,01>, |0,10>, |0,11>, |1,00>, ...
// where |n,s1 s2> has n photons and atom i in level s_i (0 ground, 1 excited).
//
// A space may keep only a subset of the product basis (an excitation cap
// n + s1 + s2 <= cap, or an explicit list such as the three-state reduced
// manifold). Subsets keep the product order. Operators on a subset are the
// compression P X P of the full product-space operator, so products such as
// a * sigma^dag that pass through states outside the subset stay correct.

#ifndef DARKZENO_HILBERT_HPP
#define DARKZENO_HILBERT_HPP

#include <algorithm>
#include <cmath>
#include <compare>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "darkzeno/core.hpp"

namespace darkzeno {

struct BasisState {
  int n_ph = 0;
  int s1 = 0;
  int s2 = 0;

  int excitations() const { return n_ph + s1 + s2; }

  auto operator<=>(const BasisState&) const = default;
};

inline std::string to_string(const BasisState& s) {
  return "|" + std::to_string(s.n_ph) + "," + std::to_string(s.s1) + std::to_string(s.s2) + ">";
}

class HilbertSpace {
 public:
  /// Full product space |n,s1,s2>, 0 <= n <= n_max.
  static HilbertSpace product(int n_max) {
    if (n_max < 1) {
      throw Error(ErrorCode::invalid_truncation, "n_max must be >= 1, got " + std::to_string(n_max));
    }
    std::vector<BasisState> states;
    states.reserve(static_cast<std::size_t>(n_max + 1) * 4);
    for (int n = 0; n <= n_max; ++n) {
      for (int s1 = 0; s1 <= 1; ++s1) {
        for (int s2 = 0; s2 <= 1; ++s2) {
          states.push_back({n, s1, s2});
        }
      }
    }
    return HilbertSpace(n_max, std::nullopt, std::move(states));
  }

  /// Keeps only the listed product states (order is normalized to product order).
  HilbertSpace restricted(std::span<const BasisState> keep) const {
    std::vector<BasisState> states;
    for (const auto& s : states_) {
      if (std::find(keep.begin(), keep.end(), s) != keep.end()) states.push_back(s);
    }
    if (states.size() != keep.size()) {
      throw Error(ErrorCode::index_out_of_range, "restricted(): a requested state is not in the space");
    }
    return HilbertSpace(n_max_, max_excitations_, std::move(states));
  }

  /// Keeps states with n + s1 + s2 <= cap.
  HilbertSpace capped(int cap) const {
    if (cap < 1) {
      throw Error(ErrorCode::invalid_truncation, "excitation cap must be >= 1, got " + std::to_string(cap));
    }
    std::vector<BasisState> states;
    for (const auto& s : states_) {
      if (s.excitations() <= cap) states.push_back(s);
    }
    return HilbertSpace(n_max_, cap, std::move(states));
  }

  int n_max() const { return n_max_; }
  std::optional<int> max_excitations() const { return max_excitations_; }
  int dim() const { return static_cast<int>(states_.size()); }
  int product_dim() const { return (n_max_ + 1) * 4; }
  bool is_full_product() const { return dim() == product_dim(); }
  const std::vector<BasisState>& states() const { return states_; }

  bool contains(const BasisState& s) const {
    return in_product_range(s) && lookup_[static_cast<std::size_t>(product_index(s))] >= 0;
  }

  int index_of(const BasisState& s) const {
    if (!contains(s)) {
      throw Error(ErrorCode::index_out_of_range, "state " + darkzeno::to_string(s) + " is outside the space");
    }
    return lookup_[static_cast<std::size_t>(product_index(s))];
  }

  const BasisState& state_of(int index) const {
    if (index < 0 || index >= dim()) {
      throw Error(ErrorCode::index_out_of_range,
                  "index " + std::to_string(index) + " outside [0, " + std::to_string(dim()) + ")");
    }
    return states_[static_cast<std::size_t>(index)];
  }

  /// Full product space with the same photon truncation.
  HilbertSpace parent() const { return product(n_max_); }

  /// P X P for an operator given on parent().
  Operator compress(const Operator& full) const {
    Operator out(dim(), dim());
    for (int i = 0; i < dim(); ++i) {
      for (int j = 0; j < dim(); ++j) {
        out(i, j) = full(product_rows_[static_cast<std::size_t>(i)], product_rows_[static_cast<std::size_t>(j)]);
      }
    }
    return out;
  }

  StateVector compress(const StateVector& full) const {
    StateVector out(dim());
    for (int i = 0; i < dim(); ++i) out(i) = full(product_rows_[static_cast<std::size_t>(i)]);
    return out;
  }

  /// Zero-padded image of a local operator in parent().
  Operator embed(const Operator& local) const {
    Operator out = Operator::Zero(product_dim(), product_dim());
    for (int i = 0; i < dim(); ++i) {
      for (int j = 0; j < dim(); ++j) {
        out(product_rows_[static_cast<std::size_t>(i)], product_rows_[static_cast<std::size_t>(j)]) = local(i, j);
      }
    }
    return out;
  }

  /// The n = n_max photon layer, whose population is reported as truncation leakage.
  bool on_truncation_edge(const BasisState& s) const { return s.n_ph == n_max_; }

  bool operator==(const HilbertSpace& other) const {
    return n_max_ == other.n_max_ && max_excitations_ == other.max_excitations_ && states_ == other.states_;
  }

 private:
  HilbertSpace(int n_max, std::optional<int> cap, std::vector<BasisState> states)
      : n_max_(n_max), max_excitations_(cap), states_(std::move(states)) {
    lookup_.assign(static_cast<std::size_t>(product_dim()), -1);
    product_rows_.reserve(states_.size());
    for (std::size_t i = 0; i < states_.size(); ++i) {
      const int p = product_index(states_[i]);
      lookup_[static_cast<std::size_t>(p)] = static_cast<int>(i);
      product_rows_.push_back(p);
    }
  }

  bool in_product_range(const BasisState& s) const {
    return s.n_ph >= 0 && s.n_ph <= n_max_ && (s.s1 == 0 || s.s1 == 1) && (s.s2 == 0 || s.s2 == 1);
  }

  static int product_index(const BasisState& s) { return s.n_ph * 4 + s.s1 * 2 + s.s2; }

  int n_max_;
  std::optional<int> max_excitations_;
  std::vector<BasisState> states_;
  std::vector<int> lookup_;        // product index -> local index, -1 if dropped
  std::vector<int> product_rows_;  // local index -> product index
};

/// Product space, optionally restricted by an excitation cap.
inline HilbertSpace build_space(int n_max, std::optional<int> max_excitations = std::nullopt) {
  HilbertSpace space = HilbertSpace::product(n_max);
  return max_excitations ? space.capped(*max_excitations) : space;
}

namespace detail {

inline Operator product_photon_annihilation(int n_max) {
  const HilbertSpace full = HilbertSpace::product(n_max);
  Operator a = Operator::Zero(full.dim(), full.dim());
  for (int j = 0; j < full.dim(); ++j) {
    const BasisState& s = full.state_of(j);
    if (s.n_ph > 0) a(full.index_of({s.n_ph - 1, s.s1, s.s2}), j) = std::sqrt(static_cast<double>(s.n_ph));
  }
  return a;
}

inline Operator product_atomic_lowering(int n_max, int atom) {
  const HilbertSpace full = HilbertSpace::product(n_max);
  Operator sigma = Operator::Zero(full.dim(), full.dim());
  for (int j = 0; j < full.dim(); ++j) {
    const BasisState& s = full.state_of(j);
    if (atom == 1 && s.s1 == 1) sigma(full.index_of({s.n_ph, 0, s.s2}), j) = 1.0;
    if (atom == 2 && s.s2 == 1) sigma(full.index_of({s.n_ph, s.s1, 0}), j) = 1.0;
  }
  return sigma;
}

inline void check_atom(int atom) {
  if (atom != 1 && atom != 2) {
    throw Error(ErrorCode::invalid_argument, "atom index must be 1 or 2, got " + std::to_string(atom));
  }
}

}  // namespace detail

/// Photon annihilation a: a|n,s1,s2> = sqrt(n)|n-1,s1,s2>. The creation
/// operator is its adjoint.
inline Operator photon_annihilation(const HilbertSpace& space) {
  return space.compress(detail::product_photon_annihilation(space.n_max()));
}

/// sigma_i lowers atom i (|1> -> |0>) and acts as identity elsewhere.
inline Operator atomic_lowering(const HilbertSpace& space, int atom) {
  detail::check_atom(atom);
  return space.compress(detail::product_atomic_lowering(space.n_max(), atom));
}

/// d_i = sigma_i^dag sigma_i, the projector onto atom i being excited.
inline Operator excitation_projector(const HilbertSpace& space, int atom) {
  detail::check_atom(atom);
  const Operator s = detail::product_atomic_lowering(space.n_max(), atom);
  return space.compress(Operator(s.adjoint() * s));
}

/// N_ex = a^dag a + d_1 + d_2 (diagonal in the product basis).
inline Operator excitation_number(const HilbertSpace& space) {
  Operator n = Operator::Zero(space.dim(), space.dim());
  for (int i = 0; i < space.dim(); ++i) n(i, i) = space.state_of(i).excitations();
  return n;
}

inline Operator basis_projector(const HilbertSpace& space, const BasisState& s) {
  Operator p = Operator::Zero(space.dim(), space.dim());
  const int i = space.index_of(s);
  p(i, i) = 1.0;
  return p;
}

inline StateVector basis_vector(const HilbertSpace& space, const BasisState& s) {
  StateVector v = StateVector::Zero(space.dim());
  v(space.index_of(s)) = 1.0;
  return v;
}

/// Trace, Hermiticity and positivity deviations of a candidate density matrix.
struct StateDiagnostics {
  double trace_deviation = 0.0;
  double hermiticity_deviation = 0.0;
  double min_eigenvalue = 0.0;
};

inline StateDiagnostics diagnose(const Operator& rho) {
  StateDiagnostics d;
  d.trace_deviation = std::abs(rho.trace() - 1.0);
  d.hermiticity_deviation = darkzeno::hermiticity_deviation(rho);
  const Operator h = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Operator> solver(h, Eigen::EigenvaluesOnly);
  d.min_eigenvalue = solver.eigenvalues().minCoeff();
  return d;
}

/// Hermitian, unit-trace, positive semidefinite operator (checked to `tol`).
class DensityMatrix {
 public:
  explicit DensityMatrix(Operator rho, double tol = 1e-8) : rho_(std::move(rho)) {
    if (rho_.rows() != rho_.cols()) throw Error(ErrorCode::invalid_input, "density matrix must be square");
    const StateDiagnostics d = diagnose(rho_);
    if (d.trace_deviation > tol || d.hermiticity_deviation > tol || d.min_eigenvalue < -tol) {
      throw Error(ErrorCode::invalid_input,
                  "not a density matrix (trace dev " + std::to_string(d.trace_deviation) + ", hermiticity dev " +
                      std::to_string(d.hermiticity_deviation) + ", min eigenvalue " +
                      std::to_string(d.min_eigenvalue) + ")");
    }
  }

  static DensityMatrix pure(const StateVector& psi) {
    const double norm = psi.norm();
    if (std::abs(norm - 1.0) > 1e-8) {
      throw Error(ErrorCode::invalid_input, "pure state must be normalized, |psi| = " + std::to_string(norm));
    }
    return DensityMatrix(psi * psi.adjoint());
  }

  /// Wraps integrator output without re-validating it.
  static DensityMatrix unchecked(Operator rho) {
    DensityMatrix out;
    out.rho_ = std::move(rho);
    return out;
  }

  const Operator& matrix() const { return rho_; }
  int dim() const { return static_cast<int>(rho_.rows()); }

 private:
  DensityMatrix() = default;
  Operator rho_;
};

}  // namespace darkzeno

#endif  // DARKZENO_HILBERT_HPP
