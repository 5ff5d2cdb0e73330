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

// Time stepping of the master equation.
//
// Two schemes:
//   euler_split  rho <- U rho U^dag, then rho <- rho + dt * D(rho), where
//                U = exp(-i H dt) comes from an eigendecomposition of H and
//                D is the dissipative part only;
//   rk4          classical fourth-order Runge-Kutta on the full generator.
//
// Two ways to drive them:
//   direct       one step at a time on the density matrix;
//   propagator   both schemes are linear maps M on vec(rho). evolve() builds
//                Y = M - I once and raises it to the record stride by binary
//                powering (Y <- 2Y + Y^2), so a record costs one matrix-vector
//                product however many steps it spans. Working with M - I keeps
//                the trace-preserving structure to ~1e-15 where powering M
//                itself drifts by ~stride * eps.

#ifndef DARKZENO_INTEGRATE_HPP
#define DARKZENO_INTEGRATE_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "darkzeno/core.hpp"
#include "darkzeno/hilbert.hpp"
#include "darkzeno/model.hpp"

namespace darkzeno {

enum class Method { euler_split, rk4 };
enum class Stepping { direct, propagator };

constexpr std::string_view to_string(Method m) { return m == Method::rk4 ? "rk4" : "euler_split"; }
constexpr std::string_view to_string(Stepping s) { return s == Stepping::direct ? "direct" : "propagator"; }

struct IntegratorConfig {
  Method method = Method::rk4;
  std::optional<double> dt;        // unset: default_dt() of the model
  double t_end = 1.0;
  std::optional<bool> sanitize;    // unset: on for euler_split, off for rk4
  int record_stride = 1;
  double monitor_tol = 1e-8;
  Stepping stepping = Stepping::direct;
  bool keep_states = false;        // store rho at every record

  bool operator==(const IntegratorConfig&) const = default;

  bool sanitizing() const { return sanitize.value_or(method == Method::euler_split); }
};

/// 1e-3 of the fastest coherent or dissipative rate.
inline double default_dt(const ModelParams& params) {
  const double fastest = params.fastest_rate();
  return fastest > 0.0 ? 1e-3 / fastest : 1e-3;
}

inline double resolve_dt(const IntegratorConfig& config, const ModelParams& params) {
  return config.dt.value_or(default_dt(params));
}

inline void validate(const IntegratorConfig& c, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorCode::invalid_argument, "dt must be > 0");
  if (!(c.t_end >= dt)) throw Error(ErrorCode::invalid_argument, "t_end must be >= dt");
  if (c.record_stride < 1) throw Error(ErrorCode::invalid_argument, "record_stride must be >= 1");
  if (!(c.monitor_tol > 0.0)) throw Error(ErrorCode::invalid_argument, "monitor_tol must be > 0");
}

struct Diagnostics {
  double trace_deviation = 0.0;
  double hermiticity_deviation = 0.0;
  double min_eigenvalue = 0.0;
  double truncation_leakage = 0.0;  // population on the truncation edge
};

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> populations;
  // propagator stepping only: populations before rounding to double
  std::vector<Eigen::Matrix<long double, Eigen::Dynamic, 1>> precise_populations;
  std::vector<double> dark_weight;
  std::vector<Diagnostics> diagnostics;
  std::vector<Operator> states;  // only with IntegratorConfig::keep_states
  Operator final_state;
  double dt = 0.0;
  bool monitor_warning = false;   // some diagnostic exceeded monitor_tol
  bool leakage_warning = false;   // truncation leakage exceeded 1e-6

  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }
};

class IntegrationDiverged : public Error {
 public:
  IntegrationDiverged(const std::string& what, TrajectoryRecord partial)
      : Error(ErrorCode::integration_diverged, what), partial_(std::move(partial)) {}
  const TrajectoryRecord& partial() const { return partial_; }

 private:
  TrajectoryRecord partial_;
};

/// exp(-i H dt) from the eigendecomposition H = V diag(l) V^dag, cached for reuse.
class UnitaryPropagator {
 public:
  UnitaryPropagator(const Operator& h, double dt) {
    const double scale = std::max(1.0, max_abs(h));
    if (hermiticity_deviation(h) > 1e-10 * scale) {
      throw Error(ErrorCode::invalid_input, "Hamiltonian is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<Operator> solver(0.5 * (h + h.adjoint()));
    const Eigen::VectorXd& l = solver.eigenvalues();
    const Operator& v = solver.eigenvectors();
    Eigen::VectorXcd phase(l.size());
    Eigen::VectorXcd phase_m1(l.size());
    for (Eigen::Index i = 0; i < l.size(); ++i) {
      const double x = l(i) * dt;
      phase(i) = std::polar(1.0, -x);
      // exp(-ix) - 1 without cancellation
      const double s = std::sin(0.5 * x);
      phase_m1(i) = Complex(-2.0 * s * s, -std::sin(x));
    }
    u_ = v * phase.asDiagonal() * v.adjoint();
    u_minus_identity_ = v * phase_m1.asDiagonal() * v.adjoint();
    u_adj_ = u_.adjoint();
  }

  const Operator& matrix() const { return u_; }
  const Operator& minus_identity() const { return u_minus_identity_; }

  Operator apply(const Operator& rho) const { return u_ * rho * u_adj_; }

 private:
  Operator u_;
  Operator u_adj_;
  Operator u_minus_identity_;
};

inline DensityMatrix unitary_step(const DensityMatrix& rho, const Operator& h, double dt) {
  return DensityMatrix::unchecked(UnitaryPropagator(h, dt).apply(rho.matrix()));
}

inline DensityMatrix euler_step(const DensityMatrix& rho, const Operator& h, const ChannelSet& channels, double dt) {
  const Operator tilde = UnitaryPropagator(h, dt).apply(rho.matrix());
  const Liouvillian dissipative(Operator::Zero(h.rows(), h.cols()), channels);
  return DensityMatrix::unchecked(tilde + dt * dissipative(tilde));
}

inline DensityMatrix rk4_step(const DensityMatrix& rho, const Operator& h, const ChannelSet& channels, double dt) {
  const Liouvillian l(h, channels);
  const Operator& r = rho.matrix();
  const Operator k1 = l(r);
  const Operator k2 = l(r + 0.5 * dt * k1);
  const Operator k3 = l(r + 0.5 * dt * k2);
  const Operator k4 = l(r + dt * k3);
  return DensityMatrix::unchecked(r + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

/// (rho + rho^dag)/2, then rho / Tr rho.
inline Operator sanitize(const Operator& rho) {
  const Complex tr = rho.trace();
  if (std::abs(tr) < 1e-6) throw Error(ErrorCode::degenerate_state, "cannot renormalize, |Tr rho| < 1e-6");
  Operator out = 0.5 * (rho + rho.adjoint());
  out /= out.trace().real();
  return out;
}

inline DensityMatrix sanitize(const DensityMatrix& rho) { return DensityMatrix::unchecked(sanitize(rho.matrix())); }

/// Reusable single-step integrator with preallocated buffers.
class Stepper {
 public:
  Stepper(Method method, const Operator& h, const ChannelSet& channels, double dt)
      : method_(method),
        dt_(dt),
        full_(h, channels),
        dissipative_(Operator::Zero(h.rows(), h.cols()), channels) {
    const auto n = h.rows();
    for (auto* m : {&k1_, &k2_, &k3_, &k4_, &tmp_}) m->resize(n, n);
    if (method == Method::euler_split) unitary_.emplace(h, dt);
  }

  void step(Operator& rho) {
    if (method_ == Method::rk4) {
      full_.apply(rho, k1_);
      tmp_ = rho + (0.5 * dt_) * k1_;
      full_.apply(tmp_, k2_);
      tmp_ = rho + (0.5 * dt_) * k2_;
      full_.apply(tmp_, k3_);
      tmp_ = rho + dt_ * k3_;
      full_.apply(tmp_, k4_);
      rho += (dt_ / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
    } else {
      tmp_.noalias() = unitary_->matrix() * rho;
      rho.noalias() = tmp_ * unitary_->matrix().adjoint();
      dissipative_.apply(rho, k1_);
      rho += dt_ * k1_;
    }
  }

 private:
  Method method_;
  double dt_;
  Liouvillian full_;
  Liouvillian dissipative_;
  std::optional<UnitaryPropagator> unitary_;
  Operator k1_, k2_, k3_, k4_, tmp_;
};

/// One step of either scheme as a linear map on column-stacked vec(rho),
/// stored as Y = M - I in extended precision. Double rounding in the powered
/// map is ~1e-16, close enough to a 1e-12 stationarity band that mirrored
/// parameter points can land one record apart.
class StepMap {
 public:
  using Real = long double;
  using Matrix = ComplexMatrix<Real>;
  using Vector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

  StepMap(Method method, const Operator& h, const ChannelSet& channels, double dt) : n_(h.rows()) {
    const auto n2 = n_ * n_;
    const Matrix id = Matrix::Identity(n2, n2);
    const Real step = dt;
    if (method == Method::rk4) {
      const Matrix hl = step * liouvillian_superoperator_in<Real>(h, channels);
      // hL (I + hL/2 (I + hL/3 (I + hL/4)))
      Matrix inner = id + hl / Real(4);
      inner = id + (hl * inner) / Real(3);
      inner = id + (hl * inner) / Real(2);
      y_ = hl * inner;
    } else {
      const Matrix delta = unitary_deviation(h, step);
      const Matrix idn = Matrix::Identity(n_, n_);
      const Matrix yk = detail::kron(Matrix(delta.conjugate()), delta) + detail::kron(Matrix(delta.conjugate()), idn) +
                        detail::kron(idn, delta);
      const Matrix hd = step * liouvillian_superoperator_in<Real>(Operator::Zero(n_, n_), channels);
      y_ = yk + hd + hd * yk;
    }
    project_trace(y_);
  }

  const Matrix& deviation() const { return y_; }

  /// M^steps - I.
  Matrix power_deviation(std::uint64_t steps) const {
    const auto n2 = n_ * n_;
    Matrix result = Matrix::Zero(n2, n2);
    Matrix base = y_;
    Matrix tmp(n2, n2);
    bool first = true;
    while (steps > 0) {
      if (steps & 1U) {
        if (first) {
          result = base;
          first = false;
        } else {
          tmp.noalias() = result * base;
          result += base;
          result += tmp;
          project_trace(result);
        }
      }
      steps >>= 1U;
      if (steps > 0) {
        tmp.noalias() = base * base;
        base *= Real(2);
        base += tmp;
        project_trace(base);
      }
    }
    return result;
  }

 private:
  // exp(-i H dt) - I without cancellation: e^{-ix} - 1 = -2 sin^2(x/2) - i sin x.
  static Matrix unitary_deviation(const Operator& h, Real dt) {
    const Operator herm = 0.5 * (h + h.adjoint());
    const Matrix hl = herm.cast<std::complex<Real>>();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(hl);
    if (eig.info() != Eigen::Success) throw Error(ErrorCode::invalid_argument, "Hamiltonian eigendecomposition failed");
    Vector d(hl.rows());
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      const Real x = eig.eigenvalues()(i) * dt;
      const Real s = std::sin(x / 2);
      d(i) = std::complex<Real>(-2 * s * s, -std::sin(x));
    }
    const Matrix& v = eig.eigenvectors();
    return v * d.asDiagonal() * v.adjoint();
  }

  // Tr(Y vec(rho)) = 0 for all rho: the diagonal rows of Y sum to zero.
  void project_trace(Matrix& y) const {
    Eigen::Matrix<std::complex<Real>, 1, Eigen::Dynamic> col_sum =
        Eigen::Matrix<std::complex<Real>, 1, Eigen::Dynamic>::Zero(y.cols());
    for (Eigen::Index i = 0; i < n_; ++i) col_sum += y.row(i * (n_ + 1));
    col_sum /= static_cast<Real>(n_);
    for (Eigen::Index i = 0; i < n_; ++i) y.row(i * (n_ + 1)) -= col_sum;
  }

  Eigen::Index n_;
  Matrix y_;
};

namespace detail {

class Recorder {
 public:
  Recorder(const IntegratorConfig& config, const StateVector& dark, const HilbertSpace& space, double dt)
      : config_(config), dark_(dark) {
    record_.dt = dt;
    for (int i = 0; i < space.dim(); ++i) edge_.push_back(space.on_truncation_edge(space.state_of(i)));
  }

  void record_precise(Eigen::Matrix<long double, Eigen::Dynamic, 1> pop) {
    record_.precise_populations.push_back(std::move(pop));
  }

  void record(double t, const Operator& rho) {
    Diagnostics d;
    const StateDiagnostics s = diagnose(rho);
    d.trace_deviation = s.trace_deviation;
    d.hermiticity_deviation = s.hermiticity_deviation;
    d.min_eigenvalue = s.min_eigenvalue;
    Eigen::VectorXd pop = rho.diagonal().real();
    for (Eigen::Index i = 0; i < pop.size(); ++i) {
      if (edge_[static_cast<std::size_t>(i)]) d.truncation_leakage += pop(i);
    }
    record_.times.push_back(t);
    record_.populations.push_back(std::move(pop));
    record_.dark_weight.push_back(dark_.size() > 0 ? (dark_.adjoint() * rho * dark_)(0, 0).real() : 0.0);
    record_.diagnostics.push_back(d);
    if (config_.keep_states) record_.states.push_back(rho);
    record_.final_state = rho;

    const double tol = config_.monitor_tol;
    if (d.trace_deviation > tol || d.hermiticity_deviation > tol || d.min_eigenvalue < -tol) {
      record_.monitor_warning = true;
    }
    if (d.truncation_leakage > 1e-6) record_.leakage_warning = true;
    const double abort = 1e3 * tol;
    const bool finite = std::isfinite(d.trace_deviation) && std::isfinite(d.min_eigenvalue);
    if (!finite || d.trace_deviation > abort || d.hermiticity_deviation > abort || d.min_eigenvalue < -abort) {
      throw IntegrationDiverged("monitor deviation above 1e3 x monitor_tol at t = " + std::to_string(t),
                                std::move(record_));
    }
  }

  TrajectoryRecord take() { return std::move(record_); }

 private:
  const IntegratorConfig& config_;
  const StateVector& dark_;
  std::vector<bool> edge_;
  TrajectoryRecord record_;
};

}  // namespace detail

/// Integrates from rho0 to config.t_end, recording every record_stride steps
/// (and the final step). Diagnostics are taken at every record; a deviation
/// above 1e3 x monitor_tol aborts with IntegrationDiverged carrying the partial
/// record. With stepping = propagator, sanitation is applied per record.
inline TrajectoryRecord evolve(const DensityMatrix& rho0, const Operator& h, const ChannelSet& channels,
                               const IntegratorConfig& config, double dt, const StateVector& dark,
                               const HilbertSpace& space) {
  validate(config, dt);
  if (rho0.dim() != h.rows() || space.dim() != h.rows()) {
    throw Error(ErrorCode::invalid_argument, "dimension mismatch between state, Hamiltonian and space");
  }
  const auto steps = static_cast<std::uint64_t>(std::ceil(config.t_end / dt - 1e-9));
  const auto stride = static_cast<std::uint64_t>(config.record_stride);
  const bool clean = config.sanitizing();

  detail::Recorder recorder(config, dark, space, dt);
  Operator rho = rho0.matrix();
  if (config.stepping == Stepping::propagator) {
    recorder.record_precise(rho.diagonal().real().cast<long double>());
  }
  recorder.record(0.0, rho);

  if (config.stepping == Stepping::direct) {
    Stepper stepper(config.method, h, channels, dt);
    for (std::uint64_t k = 1; k <= steps; ++k) {
      stepper.step(rho);
      if (clean) rho = sanitize(rho);
      if (k % stride == 0 || k == steps) recorder.record(static_cast<double>(k) * dt, rho);
    }
  } else {
    using Real = StepMap::Real;
    const StepMap map(config.method, h, channels, dt);
    const StepMap::Matrix y_stride = map.power_deviation(std::min(stride, steps));
    const auto n = h.rows();
    StepMap::Vector v = vectorize(rho).cast<std::complex<Real>>();
    StepMap::Vector dv(v.size());
    std::uint64_t k = 0;
    while (k < steps) {
      const std::uint64_t take = std::min(stride, steps - k);
      if (take == stride) {
        dv.noalias() = y_stride * v;
      } else {
        dv.noalias() = map.power_deviation(take) * v;
      }
      v += dv;
      k += take;
      if (clean) {
        // same operation as sanitize(), kept in extended precision
        std::complex<Real> tr(0);
        for (Eigen::Index i = 0; i < n; ++i) tr += v(i * (n + 1));
        if (std::abs(tr) < Real(1e-6)) {
          throw Error(ErrorCode::degenerate_state, "cannot renormalize, |Tr rho| < 1e-6");
        }
        for (Eigen::Index c = 0; c < n; ++c) {
          for (Eigen::Index r = c; r < n; ++r) {
            const auto m = (v(c * n + r) + std::conj(v(r * n + c))) / Real(2);
            v(c * n + r) = m;
            v(r * n + c) = std::conj(m);
          }
        }
        v /= tr.real();
      }
      rho = unvectorize(v.cast<Complex>(), n);
      Eigen::Matrix<Real, Eigen::Dynamic, 1> pop(n);
      for (Eigen::Index i = 0; i < n; ++i) pop(i) = v(i * (n + 1)).real();
      recorder.record_precise(std::move(pop));
      recorder.record(static_cast<double>(k) * dt, rho);
    }
  }
  return recorder.take();
}

inline TrajectoryRecord evolve(const DensityMatrix& rho0, const Operator& h, const ChannelSet& channels,
                               const IntegratorConfig& config, const ModelParams& params, const StateVector& dark,
                               const HilbertSpace& space) {
  return evolve(rho0, h, channels, config, resolve_dt(config, params), dark, space);
}

}  // namespace darkzeno

#endif  // DARKZENO_INTEGRATE_HPP
