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

// Two-atom Tavis-Cummings model with photon exchange and excitation-projector
// dephasing. Units: hbar = 1, rates and frequencies are angular frequencies in
// MHz, time is in 1/MHz (= microseconds).

#ifndef DARKZENO_MODEL_HPP
#define DARKZENO_MODEL_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "darkzeno/core.hpp"
#include "darkzeno/hilbert.hpp"

namespace darkzeno {

struct ModelParams {
  double omega = 1000.0;  // resonant mode/atom frequency
  double g1 = 30.0;
  double g2 = 50.0;
  double gamma_out = 20.0;
  double gamma_in = 10.0;
  double gamma_deph1 = 20.0;
  double gamma_deph2 = 20.0;
  bool interaction_picture = false;  // drop the omega terms (rotating frame)

  bool operator==(const ModelParams&) const = default;

  double fastest_rate() const {
    double r = interaction_picture ? 0.0 : std::abs(omega);
    for (double x : {g1, g2, gamma_out, gamma_in, gamma_deph1, gamma_deph2}) r = std::max(r, std::abs(x));
    return r;
  }
};

inline void validate(const ModelParams& p) {
  const std::array<std::pair<std::string_view, double>, 4> rates{{{"gamma_out", p.gamma_out},
                                                                   {"gamma_in", p.gamma_in},
                                                                   {"gamma_deph1", p.gamma_deph1},
                                                                   {"gamma_deph2", p.gamma_deph2}}};
  for (const auto& [name, value] : rates) {
    if (!(value >= 0.0) || !std::isfinite(value)) {
      throw Error(ErrorCode::invalid_argument, std::string(name) + " must be a finite rate >= 0");
    }
  }
  for (double v : {p.omega, p.g1, p.g2}) {
    if (!std::isfinite(v)) throw Error(ErrorCode::invalid_argument, "omega, g1, g2 must be finite");
  }
}

enum class ChannelLabel { out, in, deph1, deph2 };

constexpr std::string_view to_string(ChannelLabel label) {
  switch (label) {
    case ChannelLabel::out: return "out";
    case ChannelLabel::in: return "in";
    case ChannelLabel::deph1: return "deph1";
    case ChannelLabel::deph2: return "deph2";
  }
  return "?";
}

struct ChannelToggles {
  bool out = true;
  bool in = true;
  bool deph1 = true;
  bool deph2 = true;

  bool operator==(const ChannelToggles&) const = default;

  static ChannelToggles none() { return {false, false, false, false}; }
  static ChannelToggles all() { return {}; }
  static ChannelToggles dephasing_only() { return {false, false, true, true}; }
  static ChannelToggles outflow_and_dephasing() { return {true, false, true, true}; }
};

struct LindbladChannel {
  Operator op;
  double rate = 0.0;
  ChannelLabel label = ChannelLabel::out;
};

struct ChannelSet {
  std::vector<LindbladChannel> channels;
  ChannelToggles toggles = ChannelToggles::none();

  bool empty() const { return channels.empty(); }
  std::size_t size() const { return channels.size(); }

  bool contains(ChannelLabel label) const {
    for (const auto& c : channels) {
      if (c.label == label) return true;
    }
    return false;
  }

  const LindbladChannel& at(ChannelLabel label) const {
    for (const auto& c : channels) {
      if (c.label == label) return c;
    }
    throw Error(ErrorCode::invalid_argument, "channel " + std::string(to_string(label)) + " not enabled");
  }
};

/// H = w a^dag a + w (d1 + d2) + g1 (a^dag s1 + a s1^dag) + g2 (a^dag s2 + a s2^dag).
/// Built on the full product space and compressed onto `space`.
inline Operator build_hamiltonian(const HilbertSpace& space, const ModelParams& params) {
  const Operator a = detail::product_photon_annihilation(space.n_max());
  const Operator s1 = detail::product_atomic_lowering(space.n_max(), 1);
  const Operator s2 = detail::product_atomic_lowering(space.n_max(), 2);
  const Operator ad = a.adjoint();
  const double w = params.interaction_picture ? 0.0 : params.omega;

  Operator h = w * (ad * a) + w * (s1.adjoint() * s1 + s2.adjoint() * s2);
  h += params.g1 * (ad * s1 + a * s1.adjoint());
  h += params.g2 * (ad * s2 + a * s2.adjoint());
  return space.compress(h);
}

/// Interaction part only (omega = 0).
inline Operator build_interaction(const HilbertSpace& space, const ModelParams& params) {
  ModelParams p = params;
  p.interaction_picture = true;
  return build_hamiltonian(space, p);
}

/// Channels (a, gamma_out), (a^dag, gamma_in), (d1, gamma_deph1), (d2, gamma_deph2),
/// one per enabled toggle, in that order.
inline ChannelSet build_channels(const HilbertSpace& space, const ModelParams& params, ChannelToggles toggles) {
  validate(params);
  ChannelSet set;
  set.toggles = toggles;
  const Operator a = photon_annihilation(space);
  if (toggles.out) set.channels.push_back({a, params.gamma_out, ChannelLabel::out});
  if (toggles.in) set.channels.push_back({a.adjoint(), params.gamma_in, ChannelLabel::in});
  if (toggles.deph1) set.channels.push_back({excitation_projector(space, 1), params.gamma_deph1, ChannelLabel::deph1});
  if (toggles.deph2) set.channels.push_back({excitation_projector(space, 2), params.gamma_deph2, ChannelLabel::deph2});
  return set;
}

/// gamma (A rho A^dag - 1/2 {A^dag A, rho}), written out literally.
inline Operator apply_dissipator(const LindbladChannel& channel, const Operator& rho) {
  const Operator& a = channel.op;
  const Operator ada = a.adjoint() * a;
  return channel.rate * (a * rho * a.adjoint() - 0.5 * (ada * rho + rho * ada));
}

inline Operator apply_dissipator(const LindbladChannel& channel, const DensityMatrix& rho) {
  return apply_dissipator(channel, rho.matrix());
}

/// -i[H, rho] + sum_k D_k(rho).
inline Operator apply_liouvillian(const Operator& h, const ChannelSet& channels, const Operator& rho) {
  Operator out = -kI * commutator(h, rho);
  for (const auto& c : channels.channels) out += apply_dissipator(c, rho);
  return out;
}

inline Operator apply_liouvillian(const Operator& h, const ChannelSet& channels, const DensityMatrix& rho) {
  return apply_liouvillian(h, channels, rho.matrix());
}

/// Preassembled generator for repeated evaluation:
///   L(rho) = -i (K rho - rho K^dag) + sum_k gamma_k A_k rho A_k^dag,
///   K = H - (i/2) sum_k gamma_k A_k^dag A_k.
class Liouvillian {
 public:
  Liouvillian(const Operator& h, const ChannelSet& channels) : h_(h) {
    const auto n = h.rows();
    k_ = h;
    for (const auto& c : channels.channels) {
      if (c.rate == 0.0) continue;
      k_ -= (0.5 * c.rate) * kI * (c.op.adjoint() * c.op);
      jumps_.push_back(c.op);
      jump_adj_.push_back(c.op.adjoint());
      rates_.push_back(c.rate);
    }
    k_adj_ = k_.adjoint();
    scratch_.resize(n, n);
  }

  int dim() const { return static_cast<int>(h_.rows()); }
  const Operator& hamiltonian() const { return h_; }

  /// out = L(rho). `out` must not alias `rho`.
  void apply(const Operator& rho, Operator& out) const {
    out.noalias() = -kI * (k_ * rho);
    out.noalias() += kI * (rho * k_adj_);
    for (std::size_t j = 0; j < jumps_.size(); ++j) {
      scratch_.noalias() = jumps_[j] * rho;
      out.noalias() += rates_[j] * (scratch_ * jump_adj_[j]);
    }
  }

  Operator operator()(const Operator& rho) const {
    Operator out(rho.rows(), rho.cols());
    apply(rho, out);
    return out;
  }

 private:
  Operator h_;
  Operator k_;
  Operator k_adj_;
  std::vector<Operator> jumps_;
  std::vector<Operator> jump_adj_;
  std::vector<double> rates_;
  mutable Operator scratch_;
};

template <typename Real>
using ComplexMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

namespace detail {

template <typename M>
M kron(const M& x, const M& y) {
  M out(x.rows() * y.rows(), x.cols() * y.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
    }
  }
  return out;
}

}  // namespace detail

/// Matrix of the Liouvillian acting on column-stacked vec(rho),
/// vec(A X B) = (B^T kron A) vec(X), assembled in the precision of Real.
template <typename Real>
ComplexMatrix<Real> liouvillian_superoperator_in(const Operator& h_in, const ChannelSet& channels) {
  using M = ComplexMatrix<Real>;
  using C = std::complex<Real>;
  const auto n = h_in.rows();
  const M id = M::Identity(n, n);
  const M h = h_in.cast<C>();
  M sup = C(0, -1) * (detail::kron<M>(id, h) - detail::kron<M>(h.transpose(), id));
  for (const auto& c : channels.channels) {
    if (c.rate == 0.0) continue;
    const M a = c.op.cast<C>();
    const M ada = a.adjoint() * a;
    const Real half(0.5);
    sup += Real(c.rate) * (detail::kron<M>(a.conjugate(), a) - half * detail::kron<M>(id, ada) -
                           half * detail::kron<M>(ada.transpose(), id));
  }
  return sup;
}

inline Eigen::MatrixXcd liouvillian_superoperator(const Operator& h, const ChannelSet& channels) {
  return liouvillian_superoperator_in<double>(h, channels);
}

inline Eigen::VectorXcd vectorize(const Operator& rho) {
  return Eigen::Map<const Eigen::VectorXcd>(rho.data(), rho.size());
}

inline Operator unvectorize(const Eigen::VectorXcd& v, Eigen::Index n) {
  return Eigen::Map<const Operator>(v.data(), n, n);
}

/// |n>(g1|01> - g2|10>)/sqrt(g1^2 + g2^2); the |n,01> amplitude is real positive for g1 > 0.
inline StateVector dark_state(const HilbertSpace& space, double g1, double g2, int n = 0) {
  if (g1 == 0.0 && g2 == 0.0) throw Error(ErrorCode::degenerate_couplings, "dark state needs (g1, g2) != (0, 0)");
  const double norm = std::hypot(g1, g2);
  StateVector psi = StateVector::Zero(space.dim());
  psi(space.index_of({n, 0, 1})) = g1 / norm;
  psi(space.index_of({n, 1, 0})) = -g2 / norm;
  return psi;
}

/// mu = gamma_in / gamma_out.
inline double thermal_parameter(double gamma_in, double gamma_out) {
  if (gamma_out == 0.0) throw Error(ErrorCode::division_by_zero, "thermal parameter needs gamma_out > 0");
  return gamma_in / gamma_out;
}

/// Inverts mu = exp(-omega / T): returns T = omega / ln(1/mu), i.e. K T / hbar in
/// the frequency units of omega (omega = 1 gives T in units of hbar omega / K).
inline double temperature_for_mu(double mu, double omega) {
  if (!(mu > 0.0 && mu < 1.0)) {
    throw Error(ErrorCode::unphysical_temperature, "mu must lie in (0, 1), got " + std::to_string(mu));
  }
  if (!(omega > 0.0)) throw Error(ErrorCode::invalid_argument, "omega must be > 0");
  return omega / std::log(1.0 / mu);
}

/// k_g = g2 / g1.
inline double coupling_ratio(double g1, double g2) {
  if (g1 == 0.0) throw Error(ErrorCode::invalid_argument, "coupling ratio needs g1 != 0");
  return g2 / g1;
}

/// k_d = gamma_deph1 / gamma_deph2.
inline double dephasing_ratio(double gamma_deph1, double gamma_deph2) {
  if (gamma_deph2 == 0.0) throw Error(ErrorCode::invalid_argument, "dephasing ratio needs gamma_deph2 != 0");
  return gamma_deph1 / gamma_deph2;
}

/// One-excitation manifold {|1,00>, |0,01>, |0,10>} used by the reduced illustration.
inline std::vector<BasisState> reduced_basis() { return {{0, 0, 1}, {0, 1, 0}, {1, 0, 0}}; }

struct ReducedProjection {
  Operator projector;
  std::vector<BasisState> basis;  // canonical (photon-major) order
  std::vector<int> indices;       // positions of `basis` in the space
};

inline ReducedProjection reduced_projection(const HilbertSpace& space) {
  ReducedProjection out;
  out.projector = Operator::Zero(space.dim(), space.dim());
  for (const auto& s : space.states()) {
    const auto rb = reduced_basis();
    if (std::find(rb.begin(), rb.end(), s) == rb.end()) continue;
    const int i = space.index_of(s);
    out.projector(i, i) = 1.0;
    out.basis.push_back(s);
    out.indices.push_back(i);
  }
  if (out.basis.size() != 3) throw Error(ErrorCode::invalid_truncation, "space does not contain the reduced manifold");
  return out;
}

/// The three-state space itself, as a restriction of `space`.
inline HilbertSpace reduced_space(const HilbertSpace& space) {
  const auto basis = reduced_basis();
  return space.restricted(basis);
}

}  // namespace darkzeno

#endif  // DARKZENO_MODEL_HPP
