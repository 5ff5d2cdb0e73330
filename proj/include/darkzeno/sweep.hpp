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

// Parameter grids over the stabilization time and dark-state retention.
//
// Each grid cell is one trajectory. A cell picks its first horizon from the
// Liouvillian spectral gap, evolves with the configured integrator and keeps
// doubling the horizon until T_stab sits in the first half of it and the
// terminal residual passes; cells that never get there are censored. Cells
// are independent and write into preallocated slots, so results do not depend
// on the worker count.

#ifndef DARKZENO_SWEEP_HPP
#define DARKZENO_SWEEP_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "darkzeno/core.hpp"
#include "darkzeno/hilbert.hpp"
#include "darkzeno/integrate.hpp"
#include "darkzeno/model.hpp"
#include "darkzeno/observables.hpp"

namespace darkzeno {

// ---------------------------------------------------------------------------
// Initial states and the system under study

struct InitialState {
  enum class Kind { dark, ket, amplitudes };

  Kind kind = Kind::dark;
  int n = 0;                        // dark(n)
  BasisState ket{0, 0, 1};          // ket(n, s1, s2)
  std::vector<Complex> amplitudes;  // explicit, in the basis order of the run's space

  bool operator==(const InitialState&) const = default;

  static InitialState dark(int n = 0) { return {Kind::dark, n, {0, 0, 1}, {}}; }
  static InitialState basis(int n, int s1, int s2) { return {Kind::ket, 0, {n, s1, s2}, {}}; }
  static InitialState explicit_amplitudes(std::vector<Complex> amps) {
    return {Kind::amplitudes, 0, {0, 0, 1}, std::move(amps)};
  }

  /// Dark states follow the run's couplings; explicit amplitudes must be normalized.
  StateVector vector(const HilbertSpace& space, const ModelParams& params) const {
    switch (kind) {
      case Kind::dark: return dark_state(space, params.g1, params.g2, n);
      case Kind::ket: return basis_vector(space, ket);
      case Kind::amplitudes: {
        if (static_cast<int>(amplitudes.size()) != space.dim()) {
          throw Error(ErrorCode::invalid_input, "explicit initial state needs " + std::to_string(space.dim()) +
                                                    " amplitudes, got " + std::to_string(amplitudes.size()));
        }
        StateVector v = Eigen::Map<const StateVector>(amplitudes.data(), space.dim());
        if (std::abs(v.norm() - 1.0) > 1e-8) throw Error(ErrorCode::invalid_input, "explicit initial state is not normalized");
        return v;
      }
    }
    return {};
  }
};

inline std::string to_string(const InitialState& s) {
  switch (s.kind) {
    case InitialState::Kind::dark: return "dark(" + std::to_string(s.n) + ")";
    case InitialState::Kind::ket:
      return "ket(" + std::to_string(s.ket.n_ph) + "," + std::to_string(s.ket.s1) + "," + std::to_string(s.ket.s2) + ")";
    case InitialState::Kind::amplitudes: return "explicit";
  }
  return "";
}

/// Everything that fixes one trajectory apart from the integrator settings.
struct SystemSpec {
  ModelParams model;
  int n_max = 2;
  std::optional<int> max_excitations;
  ChannelToggles channels;
  InitialState initial;

  bool operator==(const SystemSpec&) const = default;

  HilbertSpace space() const { return build_space(n_max, max_excitations); }
};

struct SweepConfig {
  double epsilon = kDefaultStationarityEpsilon;
  double max_t_end = 1e6;  // longest horizon a cell may reach before it is censored
  int samples = 20000;     // records per horizon
  int threads = 1;

  bool operator==(const SweepConfig&) const = default;
};

// ---------------------------------------------------------------------------
// Axes

enum class AxisParam { gamma_deph1, gamma_deph2, gamma_deph, mu, g, k_g };

constexpr std::string_view to_string(AxisParam p) {
  switch (p) {
    case AxisParam::gamma_deph1: return "gamma_deph1";
    case AxisParam::gamma_deph2: return "gamma_deph2";
    case AxisParam::gamma_deph: return "gamma_deph";
    case AxisParam::mu: return "mu";
    case AxisParam::g: return "g";
    case AxisParam::k_g: return "k_g";
  }
  return "";
}

inline std::optional<AxisParam> axis_param_from_string(std::string_view s) {
  for (AxisParam p : {AxisParam::gamma_deph1, AxisParam::gamma_deph2, AxisParam::gamma_deph, AxisParam::mu,
                      AxisParam::g, AxisParam::k_g}) {
    if (to_string(p) == s) return p;
  }
  return std::nullopt;
}

/// gamma_deph sets both dephasing rates, mu sets gamma_in = mu * gamma_out,
/// g sets g1 = g2, k_g sets g2 = k * g1.
inline void apply_axis(ModelParams& p, AxisParam axis, double value) {
  switch (axis) {
    case AxisParam::gamma_deph1: p.gamma_deph1 = value; break;
    case AxisParam::gamma_deph2: p.gamma_deph2 = value; break;
    case AxisParam::gamma_deph: p.gamma_deph1 = p.gamma_deph2 = value; break;
    case AxisParam::mu: p.gamma_in = value * p.gamma_out; break;
    case AxisParam::g: p.g1 = p.g2 = value; break;
    case AxisParam::k_g: p.g2 = value * p.g1; break;
  }
}

struct AxisSpec {
  AxisParam param = AxisParam::gamma_deph1;
  double min = 0.0;
  double max = 200.0;
  int points = 41;

  bool operator==(const AxisSpec&) const = default;

  void validate() const {
    if (!(min < max)) throw Error(ErrorCode::invalid_argument, std::string(to_string(param)) + " axis needs min < max");
    if (points < 2) throw Error(ErrorCode::invalid_argument, std::string(to_string(param)) + " axis needs points >= 2");
  }

  double value(int i) const {
    if (i == points - 1) return max;
    return min + (max - min) * static_cast<double>(i) / static_cast<double>(points - 1);
  }

  std::vector<double> values() const {
    validate();
    std::vector<double> v(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) v[static_cast<std::size_t>(i)] = value(i);
    return v;
  }
};

/// Linear segments laid end to end; a segment starting where the previous one
/// ended does not repeat that point.
struct SegmentedGrid {
  struct Segment {
    double min = 0.0;
    double max = 0.0;
    int points = 2;
    bool operator==(const Segment&) const = default;
  };
  std::vector<Segment> segments;

  bool operator==(const SegmentedGrid&) const = default;

  static SegmentedGrid linear(double min, double max, int points) { return {{{min, max, points}}}; }

  std::vector<double> values() const {
    if (segments.empty()) throw Error(ErrorCode::invalid_argument, "grid has no segments");
    std::vector<double> out;
    for (const auto& s : segments) {
      const AxisSpec axis{AxisParam::gamma_deph, s.min, s.max, s.points};
      for (double v : axis.values()) {
        if (!out.empty() && v <= out.back()) {
          if (v == out.back()) continue;
          throw Error(ErrorCode::invalid_argument, "grid segments must be increasing");
        }
        out.push_back(v);
      }
    }
    return out;
  }
};

// ---------------------------------------------------------------------------
// Steady-state oracle

struct SteadyState {
  Operator rho;
  double residual = 0.0;  // ||L(rho)||_max
  int multiplicity = 1;
};

/// Null space of the vectorized Liouvillian. The multiplicity is counted from
/// the full spectrum; the unique null vector is then obtained by an LU solve
/// with one row replaced by the trace condition, hermitized and renormalized.
inline SteadyState steady_state_oracle(const Operator& h, const ChannelSet& channels) {
  bool dissipative = false;
  for (const auto& c : channels.channels) dissipative = dissipative || c.rate > 0.0;
  if (!dissipative) throw Error(ErrorCode::invalid_argument, "steady-state oracle needs a dissipative channel");

  const auto n = h.rows();
  const Eigen::MatrixXcd sup = liouvillian_superoperator(h, channels);
  const double scale = std::max(1.0, max_abs(sup));
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(sup, false);
  int zeros = 0;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    if (std::abs(solver.eigenvalues()(i)) < 1e-9 * scale) ++zeros;
  }
  if (zeros != 1) {
    throw Error(ErrorCode::degenerate_steady_state,
                "Liouvillian null space has dimension " + std::to_string(zeros) + ", expected 1");
  }

  Eigen::MatrixXcd a = sup;
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n * n);
  a.row(0).setZero();
  for (Eigen::Index i = 0; i < n; ++i) a(0, i * (n + 1)) = 1.0;
  rhs(0) = 1.0;
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
  Eigen::VectorXcd x = lu.solve(rhs);
  x += lu.solve(rhs - a * x);  // one step of iterative refinement

  SteadyState out;
  out.rho = sanitize(unvectorize(x, n));
  out.residual = max_abs(Liouvillian(h, channels)(out.rho));
  out.multiplicity = zeros;
  return out;
}

/// Slowest nonzero relaxation rate, min |Re lambda| over the nonstationary modes.
inline double spectral_gap(const Operator& h, const ChannelSet& channels) {
  const Eigen::MatrixXcd sup = liouvillian_superoperator(h, channels);
  const double scale = std::max(1.0, max_abs(sup));
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(sup, false);
  double gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const double re = -solver.eigenvalues()(i).real();
    if (re > 1e-9 * scale) gap = std::min(gap, re);
  }
  return gap;
}

// ---------------------------------------------------------------------------
// Single cell

struct CellResult {
  double t_stab = 0.0;
  double p_ret = 0.0;
  bool censored = false;
  bool diverged = false;  // censored because a step blew up
  double horizon = 0.0;
  Diagnostics worst;  // max deviations over every record of the final horizon
  bool leakage_warning = false;
  std::string note;   // why the cell is censored, empty otherwise

  bool operator==(const CellResult& o) const {
    return t_stab == o.t_stab && p_ret == o.p_ret && censored == o.censored && horizon == o.horizon;
  }
};

namespace detail {

inline Diagnostics worst_of(const TrajectoryRecord& rec) {
  Diagnostics w;
  w.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (const auto& d : rec.diagnostics) {
    w.trace_deviation = std::max(w.trace_deviation, d.trace_deviation);
    w.hermiticity_deviation = std::max(w.hermiticity_deviation, d.hermiticity_deviation);
    w.min_eigenvalue = std::min(w.min_eigenvalue, d.min_eigenvalue);
    w.truncation_leakage = std::max(w.truncation_leakage, d.truncation_leakage);
  }
  return w;
}

}  // namespace detail

/// First horizon: 2.5 ln(1/epsilon) / gap, at least integrator.t_end.
inline double initial_horizon(const Operator& h, const ChannelSet& channels, const IntegratorConfig& integrator,
                              const SweepConfig& sweep) {
  const double gap = spectral_gap(h, channels);
  double t = integrator.t_end;
  if (std::isfinite(gap)) t = std::max(t, 2.5 * std::log(1.0 / sweep.epsilon) / gap);
  return std::min(t, sweep.max_t_end);
}

inline CellResult run_cell(const SystemSpec& system, const IntegratorConfig& integrator, const SweepConfig& sweep) {
  const HilbertSpace space = system.space();
  const Operator h = build_hamiltonian(space, system.model);
  const ChannelSet channels = build_channels(space, system.model, system.channels);
  const StateVector dark = dark_state(space, system.model.g1, system.model.g2);
  const DensityMatrix rho0 = DensityMatrix::pure(system.initial.vector(space, system.model));
  const Liouvillian l(h, channels);
  const double dt = resolve_dt(integrator, system.model);

  CellResult out;
  double horizon = std::max(initial_horizon(h, channels, integrator, sweep), dt);
  for (;;) {
    IntegratorConfig c = integrator;
    c.t_end = horizon;
    c.keep_states = false;
    const double steps = std::ceil(horizon / dt - 1e-9);
    c.record_stride = static_cast<int>(std::clamp(std::floor(steps / sweep.samples), 1.0, 2e9));
    out.horizon = horizon;
    try {
      const TrajectoryRecord rec = evolve(rho0, h, channels, c, dt, dark, space);
      const RetentionResult r = retention_result(rec, l, sweep.epsilon);
      out.t_stab = r.t_stab;
      out.p_ret = r.p_ret;
      out.worst = detail::worst_of(rec);
      out.leakage_warning = rec.leakage_warning;
      const bool settled = r.converged && r.t_stab <= 0.5 * horizon;
      if (settled) {
        out.censored = false;
        out.note.clear();
        return out;
      }
      out.censored = true;
      out.note = r.converged ? "stationary only in the second half of the horizon" : "not stationary within the horizon";
    } catch (const IntegrationDiverged& e) {
      out.censored = true;
      out.diverged = true;
      out.note = e.what();
      out.worst = detail::worst_of(e.partial());
      return out;
    }
    if (horizon >= sweep.max_t_end) return out;
    horizon = std::min(2.0 * horizon, sweep.max_t_end);
  }
}

// ---------------------------------------------------------------------------
// Worker pool

namespace detail {

/// Calls task(i) for i in [0, count) on `threads` workers. IntegrationDiverged
/// is handled inside the cell runner; any other exception stops the pool and
/// the one from the lowest index is rethrown.
template <typename Task>
void parallel_for(std::size_t count, int threads, Task&& task) {
  const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), 1, std::max<std::size_t>(count, 1));
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::mutex error_mutex;
  std::size_t error_index = count;
  std::exception_ptr error;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count || stop.load()) return;
      try {
        task(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
        stop.store(true);
      }
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Heatmaps

struct Normalization {
  double min = 0.0;
  double max = 0.0;
  bool operator==(const Normalization&) const = default;
};

using BoolGrid = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

struct NormalizedGrid {
  Eigen::MatrixXd values;  // NaN at censored cells
  Normalization meta;
};

/// Min-max scaling over the non-censored cells. A constant grid maps to zeros.
inline NormalizedGrid normalize_heatmap(const Eigen::MatrixXd& grid, const BoolGrid& censored) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (Eigen::Index i = 0; i < grid.rows(); ++i) {
    for (Eigen::Index j = 0; j < grid.cols(); ++j) {
      if (censored(i, j)) continue;
      lo = std::min(lo, grid(i, j));
      hi = std::max(hi, grid(i, j));
    }
  }
  if (!(lo <= hi)) throw Error(ErrorCode::empty_grid, "every cell is censored, nothing to normalize");
  NormalizedGrid out{Eigen::MatrixXd(grid.rows(), grid.cols()), {lo, hi}};
  const double span = hi - lo;
  for (Eigen::Index i = 0; i < grid.rows(); ++i) {
    for (Eigen::Index j = 0; j < grid.cols(); ++j) {
      if (censored(i, j)) {
        out.values(i, j) = std::numeric_limits<double>::quiet_NaN();
      } else {
        out.values(i, j) = span > 0.0 ? (grid(i, j) - lo) / span : 0.0;
      }
    }
  }
  return out;
}

inline NormalizedGrid normalize_heatmap(const Eigen::MatrixXd& grid) {
  return normalize_heatmap(grid, BoolGrid::Constant(grid.rows(), grid.cols(), false));
}

inline Eigen::MatrixXd denormalize(const NormalizedGrid& g) {
  return (g.values.array() * (g.meta.max - g.meta.min) + g.meta.min).matrix();
}

struct HeatmapResult {
  AxisSpec x;  // rows
  AxisSpec y;  // columns
  Eigen::MatrixXd t_stab;
  Eigen::MatrixXd p_ret;
  BoolGrid censored;
  Normalization t_stab_norm;
  Normalization p_ret_norm;
  Diagnostics worst;
  bool leakage_warning = false;
  std::size_t diverged_count = 0;

  Eigen::Index rows() const { return t_stab.rows(); }
  Eigen::Index cols() const { return t_stab.cols(); }
  std::size_t censored_count() const { return static_cast<std::size_t>(censored.count()); }
};

namespace detail {

inline void merge_worst(Diagnostics& into, const Diagnostics& d) {
  into.trace_deviation = std::max(into.trace_deviation, d.trace_deviation);
  into.hermiticity_deviation = std::max(into.hermiticity_deviation, d.hermiticity_deviation);
  into.min_eigenvalue = std::min(into.min_eigenvalue, d.min_eigenvalue);
  into.truncation_leakage = std::max(into.truncation_leakage, d.truncation_leakage);
}

}  // namespace detail

inline HeatmapResult run_heatmap(const SystemSpec& base, const AxisSpec& x, const AxisSpec& y,
                                 const IntegratorConfig& integrator, const SweepConfig& sweep) {
  x.validate();
  y.validate();
  if (x.param == y.param) throw Error(ErrorCode::invalid_argument, "heatmap axes must be distinct parameters");
  const std::vector<double> xv = x.values();
  const std::vector<double> yv = y.values();
  const auto nx = xv.size();
  const auto ny = yv.size();
  std::vector<CellResult> cells(nx * ny);
  detail::parallel_for(cells.size(), sweep.threads, [&](std::size_t k) {
    SystemSpec s = base;
    apply_axis(s.model, x.param, xv[k / ny]);
    apply_axis(s.model, y.param, yv[k % ny]);
    cells[k] = run_cell(s, integrator, sweep);
  });

  HeatmapResult out;
  out.x = x;
  out.y = y;
  out.t_stab.resize(static_cast<Eigen::Index>(nx), static_cast<Eigen::Index>(ny));
  out.p_ret.resizeLike(out.t_stab);
  out.censored.resize(out.t_stab.rows(), out.t_stab.cols());
  out.worst.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k / ny);
    const auto j = static_cast<Eigen::Index>(k % ny);
    out.t_stab(i, j) = cells[k].t_stab;
    out.p_ret(i, j) = cells[k].p_ret;
    out.censored(i, j) = cells[k].censored;
    detail::merge_worst(out.worst, cells[k].worst);
    out.leakage_warning = out.leakage_warning || cells[k].leakage_warning;
    if (cells[k].diverged) ++out.diverged_count;
  }
  if (out.censored_count() < cells.size()) {
    out.t_stab_norm = normalize_heatmap(out.t_stab, out.censored).meta;
    out.p_ret_norm = normalize_heatmap(out.p_ret, out.censored).meta;
  }
  return out;
}

/// True when the non-censored interior of `grid` holds its minimum and every
/// border cell is strictly above it.
inline bool has_interior_minimum(const Eigen::MatrixXd& grid, const BoolGrid& censored) {
  double inner = std::numeric_limits<double>::infinity();
  double border = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < grid.rows(); ++i) {
    for (Eigen::Index j = 0; j < grid.cols(); ++j) {
      if (censored(i, j)) continue;
      const bool edge = i == 0 || j == 0 || i == grid.rows() - 1 || j == grid.cols() - 1;
      (edge ? border : inner) = std::min(edge ? border : inner, grid(i, j));
    }
  }
  return std::isfinite(inner) && inner < border;
}

// ---------------------------------------------------------------------------
// Diagonal cuts

enum class Regime { excluded, anti_zeno, zeno };

constexpr std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::excluded: return "excluded";
    case Regime::anti_zeno: return "anti_zeno";
    case Regime::zeno: return "zeno";
  }
  return "";
}

/// Vertex of the parabola through three points with distinct abscissae.
inline std::pair<double, double> parabola_vertex(double x0, double y0, double x1, double y1, double x2, double y2) {
  const double d01 = (y1 - y0) / (x1 - x0);
  const double d12 = (y2 - y1) / (x2 - x1);
  const double a = (d12 - d01) / (x2 - x0);
  if (!(a > 0.0)) return {x1, y1};
  const double b = d01 - a * (x0 + x1);
  const double xv = -b / (2.0 * a);
  const double c = y0 - x0 * (b + a * x0);
  return {xv, c + xv * (b + a * xv)};
}

/// Centered moving average over up to five points; the window shrinks
/// symmetrically at the ends.
inline std::vector<double> smooth5(const std::vector<double>& v) {
  std::vector<double> out(v.size());
  const auto n = static_cast<std::ptrdiff_t>(v.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::ptrdiff_t r = std::min<std::ptrdiff_t>({2, i, n - 1 - i});
    double s = 0.0;
    for (std::ptrdiff_t k = i - r; k <= i + r; ++k) s += v[static_cast<std::size_t>(k)];
    out[static_cast<std::size_t>(i)] = s / static_cast<double>(2 * r + 1);
  }
  return out;
}

struct DiagonalScan {
  std::vector<double> gamma;
  std::vector<double> t_stab;
  std::vector<double> p_ret;
  std::vector<bool> censored;
  std::vector<Regime> regime;
  bool interior_minimum = false;
  double gamma_min = std::numeric_limits<double>::quiet_NaN();  // parabola-refined
  double t_min = std::numeric_limits<double>::quiet_NaN();      // smallest sampled T_stab
  std::size_t argmin = 0;                                        // grid index of the smallest T_stab
  double p_ret_at_min = std::numeric_limits<double>::quiet_NaN();
  double p_ret_min = std::numeric_limits<double>::quiet_NaN();   // over every classified point
  Diagnostics worst;
  bool leakage_warning = false;
  std::size_t diverged_count = 0;

  std::size_t censored_count() const { return static_cast<std::size_t>(std::count(censored.begin(), censored.end(), true)); }

  /// Indices with gamma > 0 that are not censored, in grid order.
  std::vector<std::size_t> classified() const {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < gamma.size(); ++i) {
      if (gamma[i] > 0.0 && !censored[i]) idx.push_back(i);
    }
    return idx;
  }
};

/// Fills the gamma_min / regime fields of a scan whose series are set.
inline void analyze_diagonal(DiagonalScan& scan) {
  const auto idx = scan.classified();
  scan.regime.assign(scan.gamma.size(), Regime::excluded);
  scan.interior_minimum = false;
  if (idx.empty()) return;

  std::size_t best = 0;
  for (std::size_t k = 1; k < idx.size(); ++k) {
    if (scan.t_stab[idx[k]] < scan.t_stab[idx[best]]) best = k;
  }
  scan.argmin = idx[best];
  scan.p_ret_at_min = scan.p_ret[scan.argmin];
  scan.p_ret_min = scan.p_ret[idx[0]];
  for (auto i : idx) scan.p_ret_min = std::min(scan.p_ret_min, scan.p_ret[i]);

  if (best > 0 && best + 1 < idx.size()) {
    scan.interior_minimum = true;
    const double x0 = scan.gamma[idx[best - 1]];
    const double x2 = scan.gamma[idx[best + 1]];
    const auto vertex = parabola_vertex(x0, scan.t_stab[idx[best - 1]], scan.gamma[idx[best]], scan.t_stab[idx[best]],
                                        x2, scan.t_stab[idx[best + 1]]);
    scan.gamma_min = std::clamp(vertex.first, x0, x2);
  } else {
    scan.gamma_min = scan.gamma[scan.argmin];
  }
  // the parabola overshoots on strongly uneven brackets, so T_min stays the sampled value
  scan.t_min = scan.t_stab[scan.argmin];
  for (auto i : idx) scan.regime[i] = i <= scan.argmin ? Regime::anti_zeno : Regime::zeno;
}

inline DiagonalScan diagonal_scan(const SystemSpec& base, const SegmentedGrid& grid, const IntegratorConfig& integrator,
                                  const SweepConfig& sweep) {
  DiagonalScan scan;
  scan.gamma = grid.values();
  const auto n = scan.gamma.size();
  std::vector<CellResult> cells(n);
  detail::parallel_for(n, sweep.threads, [&](std::size_t k) {
    SystemSpec s = base;
    apply_axis(s.model, AxisParam::gamma_deph, scan.gamma[k]);
    cells[k] = run_cell(s, integrator, sweep);
  });
  scan.worst.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (const auto& c : cells) {
    scan.t_stab.push_back(c.t_stab);
    scan.p_ret.push_back(c.p_ret);
    scan.censored.push_back(c.censored);
    detail::merge_worst(scan.worst, c.worst);
    scan.leakage_warning = scan.leakage_warning || c.leakage_warning;
    if (c.diverged) ++scan.diverged_count;
  }
  analyze_diagonal(scan);
  return scan;
}

// ---------------------------------------------------------------------------
// gamma_min against the coupling

struct GminPoint {
  double g = 0.0;
  double gamma_min = 0.0;
  double t_min = 0.0;
  double p_ret_at_min = 0.0;
  double p_ret_min = 0.0;
  bool interior_minimum = false;
  std::size_t diverged_count = 0;
};

inline std::vector<GminPoint> gmin_vs_g(const SystemSpec& base, const std::vector<double>& g_values,
                                        const SegmentedGrid& grid, const IntegratorConfig& integrator,
                                        const SweepConfig& sweep, std::vector<DiagonalScan>* scans = nullptr) {
  std::vector<GminPoint> out;
  for (double g : g_values) {
    SystemSpec s = base;
    apply_axis(s.model, AxisParam::g, g);
    DiagonalScan d = diagonal_scan(s, grid, integrator, sweep);
    out.push_back({g, d.gamma_min, d.t_min, d.p_ret_at_min, d.p_ret_min, d.interior_minimum, d.diverged_count});
    if (scans) scans->push_back(std::move(d));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Regime classification and the k0 threshold

enum class Pattern { zeno_first, saddle, anti_zeno_first, unclassified };

constexpr std::string_view to_string(Pattern p) {
  switch (p) {
    case Pattern::zeno_first: return "zeno_first";
    case Pattern::saddle: return "saddle";
    case Pattern::anti_zeno_first: return "anti_zeno_first";
    case Pattern::unclassified: return "unclassified";
  }
  return "";
}

/// Sign of the T_stab change between the two smallest classified gammas;
/// saddle when that change is below 1% of the series' range.
inline Pattern classify_initial_slope(const DiagonalScan& scan) {
  const auto idx = scan.classified();
  if (idx.size() < 2) return Pattern::unclassified;
  double lo = scan.t_stab[idx[0]];
  double hi = lo;
  for (auto i : idx) {
    lo = std::min(lo, scan.t_stab[i]);
    hi = std::max(hi, scan.t_stab[i]);
  }
  const double change = scan.t_stab[idx[1]] - scan.t_stab[idx[0]];
  if (std::abs(change) < 0.01 * (hi - lo) || hi == lo) return Pattern::saddle;
  return change < 0.0 ? Pattern::anti_zeno_first : Pattern::zeno_first;
}

struct ThresholdScan {
  std::vector<double> g1;
  std::vector<double> k;
  std::vector<std::vector<Pattern>> pattern;  // [g1 index][k index]
  std::vector<std::optional<double>> k0;      // empty when not bracketed
  std::vector<bool> bracketed;
  std::size_t diverged_count = 0;  // over every diagonal scan run, bisection included
};

inline Pattern classify_at(const SystemSpec& base, double g1, double k, const SegmentedGrid& grid,
                           const IntegratorConfig& integrator, const SweepConfig& sweep,
                           std::size_t* diverged = nullptr) {
  SystemSpec s = base;
  s.model.g1 = g1;
  apply_axis(s.model, AxisParam::k_g, k);
  const DiagonalScan scan = diagonal_scan(s, grid, integrator, sweep);
  if (diverged) *diverged += scan.diverged_count;
  return classify_initial_slope(scan);
}

/// Classifies every (g1, k) pair, then bisects in k between the first adjacent
/// zeno_first / anti_zeno_first pair (saddles in between are skipped) until
/// the bracket is narrower than 1e-2 relative.
inline ThresholdScan k0_scan(const SystemSpec& base, const std::vector<double>& g1_values, const AxisSpec& k_axis,
                             const SegmentedGrid& grid, const IntegratorConfig& integrator, const SweepConfig& sweep) {
  ThresholdScan out;
  out.g1 = g1_values;
  out.k = k_axis.values();
  for (double g1 : g1_values) {
    std::vector<Pattern> row;
    for (double k : out.k) row.push_back(classify_at(base, g1, k, grid, integrator, sweep, &out.diverged_count));

    std::optional<std::pair<std::size_t, std::size_t>> bracket;
    std::optional<std::size_t> last;
    for (std::size_t i = 0; i < row.size() && !bracket; ++i) {
      if (row[i] != Pattern::zeno_first && row[i] != Pattern::anti_zeno_first) continue;
      if (last && row[*last] != row[i]) bracket = std::pair{*last, i};
      last = i;
    }
    if (!bracket) {
      out.k0.push_back(std::nullopt);
      out.bracketed.push_back(false);
    } else {
      double lo = out.k[bracket->first];
      double hi = out.k[bracket->second];
      const Pattern lo_pattern = row[bracket->first];
      while ((hi - lo) > 1e-2 * 0.5 * (hi + lo)) {
        const double mid = 0.5 * (lo + hi);
        const Pattern p = classify_at(base, g1, mid, grid, integrator, sweep, &out.diverged_count);
        if (p == lo_pattern) {
          lo = mid;
        } else if (p == Pattern::saddle || p == Pattern::unclassified) {
          break;
        } else {
          hi = mid;
        }
      }
      out.k0.push_back(0.5 * (lo + hi));
      out.bracketed.push_back(true);
    }
    out.pattern.push_back(std::move(row));
  }
  return out;
}

}  // namespace darkzeno

#endif  // DARKZENO_SWEEP_HPP
