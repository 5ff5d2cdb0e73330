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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero when any of them fails. `acceptance 3 7` runs a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "darkzeno/darkzeno.hpp"

using namespace darkzeno;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string g6(double v) { return fmt("%.6g", v); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string runtime_note(double elapsed, double limit) {
  const std::string note = "; runtime " + fmt("%.1f", elapsed) + " s";
  return limit > 0 ? note + " (limit " + fmt("%.0f", limit) + " s)" : note;
}

// --- 1 -----------------------------------------------------------------------

Verdict dark_state_stationarity() {
  const auto t0 = std::chrono::steady_clock::now();
  RunConfig c = preset("fig1");
  c.system.channels = {true, false, false, false};
  const HilbertSpace space = c.system.space();
  const Operator h = build_hamiltonian(space, c.system.model);
  const ChannelSet channels = build_channels(space, c.system.model, c.system.channels);
  const StateVector dark = dark_state(space, c.system.model.g1, c.system.model.g2);
  IntegratorConfig ic;
  ic.method = Method::rk4;
  ic.stepping = Stepping::direct;
  ic.dt = default_dt(c.system.model);
  ic.t_end = 1e5 * *ic.dt;
  ic.record_stride = 10;
  const auto rec = evolve(DensityMatrix::pure(dark), h, channels, ic, *ic.dt, dark, space);
  double worst = 0.0;
  for (double w : rec.dark_weight) worst = std::max(worst, std::abs(w - 1.0));
  const double elapsed = seconds_since(t0);
  const auto steps = static_cast<long>(std::llround(ic.t_end / *ic.dt));
  return {worst < 1e-10 && elapsed < 5.0,
          "max |dark_weight - 1| = " + g6(worst) + " over " + std::to_string(steps) + " RK4 steps" +
              runtime_note(elapsed, 5)};
}

// --- 2 -----------------------------------------------------------------------

Verdict reduced_fidelity() {
  const auto t0 = std::chrono::steady_clock::now();
  const RunConfig c = preset("fig10");
  const HilbertSpace space = reduced_space(c.system.space().parent());
  const Operator h = build_hamiltonian(space, c.system.model);
  const ChannelSet channels = build_channels(space, c.system.model, c.system.channels);
  const StateVector dark = dark_state(space, c.system.model.g1, c.system.model.g2);
  const auto rec = evolve(DensityMatrix::pure(dark), h, channels, c.integrator, resolve_dt(c.integrator, c.system.model),
                          dark, space);
  const double f = rec.dark_weight.back();
  const double elapsed = seconds_since(t0);
  return {std::abs(f - 1.0 / 3.0) <= 0.02 && elapsed < 5.0,
          "final fidelity " + g6(f) + " at t = " + g6(rec.times.back()) + " (target 1/3 +- 0.02)" +
              runtime_note(elapsed, 5)};
}

// --- 3 -----------------------------------------------------------------------

Verdict crossover() {
  const auto t0 = std::chrono::steady_clock::now();
  const RunConfig c = preset("fig4");
  const DiagonalScan d = diagonal_scan(c.system, c.diagonal.grid, c.integrator, c.sweep);
  const double elapsed = seconds_since(t0);

  const auto idx = d.classified();
  std::vector<double> t, p;
  for (auto i : idx) {
    t.push_back(d.t_stab[i]);
    p.push_back(d.p_ret[i]);
  }
  const auto s = smooth5(t);
  std::size_t m = 0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s[i] < s[m]) m = i;
  }
  bool down = m > 0 && m + 1 < s.size();
  bool up = down;
  for (std::size_t i = 1; i <= m && i < s.size(); ++i) down = down && s[i] < s[i - 1];
  for (std::size_t i = m + 1; i < s.size(); ++i) up = up && s[i] > s[i - 1];

  std::size_t pm = 0;
  for (std::size_t i = 1; i < p.size(); ++i) {
    if (p[i] < p[pm]) pm = i;
  }
  const bool dip = !p.empty() && pm > 0 && pm + 1 < p.size() && p.front() > p[pm] && p.back() > p[pm];

  const bool pass = d.interior_minimum && down && up && dip && d.censored_count() == 0 && elapsed < 120.0;
  return {pass, std::string("interior minimum ") + (d.interior_minimum ? "yes" : "no") + ", gamma_min = " +
                    g6(d.gamma_min) + " MHz, T_min = " + g6(d.t_min) + "; smoothed T_stab strictly decreasing " +
                    (down ? "yes" : "no") + " / strictly increasing after " + (up ? "yes" : "no") +
                    "; P_ret " + g6(p.front()) + " -> min " + g6(p[pm]) + " at gamma " +
                    g6(d.gamma[idx[pm]]) + " -> " + g6(p.back()) + " (dip " + (dip ? "yes" : "no") +
                    ", depth " + g6(p.front() - p[pm]) + ", rise " + g6(p.back() - p[pm]) + "); censored " +
                    std::to_string(d.censored_count()) + runtime_note(elapsed, 120)};
}

// --- 4 -----------------------------------------------------------------------

Verdict retention_floor() {
  const auto t0 = std::chrono::steady_clock::now();
  const RunConfig c = preset("fig5");
  const auto points = gmin_vs_g(c.system, c.gmin.g, c.gmin.grid, c.integrator, c.sweep);
  const double elapsed = seconds_since(t0);
  bool floor_ok = true;
  bool monotone = true;
  bool interior = true;
  std::string series;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    floor_ok = floor_ok && std::abs(p.p_ret_min - 0.1579) <= 0.02;
    interior = interior && p.interior_minimum;
    if (i > 0) monotone = monotone && p.gamma_min >= points[i - 1].gamma_min;
    series += (i ? ", " : "") + g6(p.g) + ":" + g6(p.gamma_min);
  }
  double lo = 1.0, hi = 0.0;
  for (const auto& p : points) {
    lo = std::min(lo, p.p_ret_min);
    hi = std::max(hi, p.p_ret_min);
  }
  return {floor_ok && monotone && interior && elapsed < 600.0,
          "P_ret min over gamma in [" + g6(lo) + ", " + g6(hi) + "] (target 0.1579 +- 0.02); gamma_min(g) " +
              (monotone ? "non-decreasing" : "NOT non-decreasing") + " (g:gamma_min " + series + ")" +
              (interior ? "" : "; some g without interior minimum") + runtime_note(elapsed, 600)};
}

// --- 5 -----------------------------------------------------------------------

Verdict k0_threshold() {
  const auto t0 = std::chrono::steady_clock::now();
  const RunConfig c = preset("fig6");
  const ThresholdScan t = k0_scan(c.system, c.k0scan.g1, c.k0scan.k, c.k0scan.grid, c.integrator, c.sweep);
  const double elapsed = seconds_since(t0);

  std::size_t base = 0;
  for (std::size_t i = 1; i < t.g1.size(); ++i) {
    if (t.g1[i] < t.g1[base]) base = i;
  }
  const bool at_base = t.k0[base] && std::abs(*t.k0[base] - 1.8) <= 0.3;
  bool decreasing = true;
  std::vector<std::size_t> order(t.g1.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return t.g1[a] < t.g1[b]; });
  for (std::size_t i = 1; i < order.size(); ++i) {
    const auto& a = t.k0[order[i - 1]];
    const auto& b = t.k0[order[i]];
    decreasing = decreasing && a && b && *b < *a;
  }

  std::string k0s;
  for (std::size_t i = 0; i < t.g1.size(); ++i) {
    k0s += (i ? ", " : "") + g6(t.g1[i]) + ":" + (t.k0[i] ? g6(*t.k0[i]) : std::string("not bracketed"));
  }
  std::map<std::string, int> counts;
  for (const auto& row : t.pattern) {
    for (auto p : row) ++counts[std::string(to_string(p))];
  }
  std::string tally;
  for (const auto& [name, n] : counts) tally += (tally.empty() ? "" : ", ") + name + " " + std::to_string(n);
  return {at_base && decreasing && elapsed < 900.0,
          "k0 (g1:k0) " + k0s + "; baseline g1 = " + g6(t.g1[base]) + " target 1.8 +- 0.3; k0(g1) strictly decreasing " +
              (decreasing ? "yes" : "no") + "; patterns: " + tally + runtime_note(elapsed, 900)};
}

// --- 6 -----------------------------------------------------------------------

Verdict oracle_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  bool pass = true;
  std::string detail;
  for (const char* name : {"fig1", "fig3", "fig4", "fig7"}) {
    const RunConfig c = preset(name);
    const HilbertSpace space = c.system.space();
    const Operator h = build_hamiltonian(space, c.system.model);
    const ChannelSet channels = build_channels(space, c.system.model, c.system.channels);
    const SteadyState ss = steady_state_oracle(h, channels);
    IntegratorConfig ic = c.integrator;
    ic.method = Method::rk4;
    ic.stepping = Stepping::propagator;
    const double dt = resolve_dt(ic, c.system.model);
    ic.t_end = 2.0 * initial_horizon(h, channels, ic, c.sweep);
    ic.record_stride = static_cast<int>(std::max(1.0, std::floor(ic.t_end / dt / 100.0)));
    const StateVector dark = dark_state(space, c.system.model.g1, c.system.model.g2);
    const auto rec = evolve(DensityMatrix::pure(c.system.initial.vector(space, c.system.model)), h, channels, ic, dt,
                            dark, space);
    const double d = trace_distance(rec.final_state, ss.rho);
    pass = pass && d < 1e-8 && ss.residual < 1e-10;
    detail += std::string(detail.empty() ? "" : "; ") + name + " trace distance " + g6(d) + " at t = " +
              g6(rec.times.back()) + " (oracle residual " + g6(ss.residual) + ")";
  }
  const double elapsed = seconds_since(t0);
  return {pass && elapsed < 30.0, detail + runtime_note(elapsed, 30)};
}

// --- 7 -----------------------------------------------------------------------

Operator final_state(Method method, const Operator& rho0, const Operator& h, const ChannelSet& channels, double dt,
                     double t_end) {
  Stepper stepper(method, h, channels, dt);
  Operator rho = rho0;
  const auto steps = static_cast<long>(std::llround(t_end / dt));
  for (long k = 0; k < steps; ++k) stepper.step(rho);
  return rho;
}

double fitted_slope(const std::vector<double>& dts, const std::vector<double>& errs) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(dts.size());
  for (std::size_t i = 0; i < dts.size(); ++i) {
    const double x = std::log(dts[i]);
    const double y = std::log(errs[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Verdict convergence_orders() {
  const auto t0 = std::chrono::steady_clock::now();
  const RunConfig c = preset("fig1");
  const HilbertSpace space = c.system.space();
  const Operator h = build_hamiltonian(space, c.system.model);
  const ChannelSet channels = build_channels(space, c.system.model, c.system.channels);
  const Operator rho0 = DensityMatrix::pure(c.system.initial.vector(space, c.system.model)).matrix();
  const double t_end = 0.1;
  // the smallest RK4 error stays two decades above the roundoff floor (~1e-14)
  const std::vector<double> dts{4e-4, 2e-4, 1e-4, 5e-5};
  const Operator reference = final_state(Method::rk4, rho0, h, channels, dts.back() / 64.0, t_end);

  std::vector<double> euler, rk4;
  for (double dt : dts) {
    euler.push_back(max_abs(final_state(Method::euler_split, rho0, h, channels, dt, t_end) - reference));
    rk4.push_back(max_abs(final_state(Method::rk4, rho0, h, channels, dt, t_end) - reference));
  }
  const double se = fitted_slope(dts, euler);
  const double sr = fitted_slope(dts, rk4);
  const double elapsed = seconds_since(t0);
  std::string errs;
  for (std::size_t i = 0; i < dts.size(); ++i) {
    errs += (i ? ", " : "") + g6(dts[i]) + ":" + g6(euler[i]) + "/" + g6(rk4[i]);
  }
  return {std::abs(se - 1.0) <= 0.15 && std::abs(sr - 4.0) <= 0.3 && elapsed < 60.0,
          "slopes euler_split " + fmt("%.3f", se) + " (1 +- 0.15), rk4 " + fmt("%.3f", sr) +
              " (4 +- 0.3); errors dt:euler/rk4 " + errs + runtime_note(elapsed, 60)};
}

// --- 8 -----------------------------------------------------------------------

Verdict conservation() {
  const auto t0 = std::chrono::steady_clock::now();
  Diagnostics worst;
  worst.min_eigenvalue = std::numeric_limits<double>::infinity();
  int runs = 0;
  auto absorb = [&](const TrajectoryRecord& rec) {
    for (const auto& d : rec.diagnostics) detail::merge_worst(worst, d);
    ++runs;
  };
  for (const auto& name : preset_names()) {
    RunConfig c = preset(name);
    c.integrator.sanitize = false;
    for (bool reduced : {false, true}) {
      if (reduced && name != "fig10") continue;
      const HilbertSpace space = reduced ? reduced_space(c.system.space().parent()) : c.system.space();
      const Operator h = build_hamiltonian(space, c.system.model);
      const ChannelSet channels = build_channels(space, c.system.model, c.system.channels);
      const StateVector dark = dark_state(space, c.system.model.g1, c.system.model.g2);
      for (Stepping stepping : {Stepping::propagator, Stepping::direct}) {
        IntegratorConfig ic = c.integrator;
        ic.stepping = stepping;
        if (stepping == Stepping::direct) {
          ic.t_end = 0.5;
          ic.record_stride = 100;
        }
        absorb(evolve(DensityMatrix::pure(c.system.initial.vector(space, c.system.model)), h, channels, ic,
                      resolve_dt(ic, c.system.model), dark, space));
      }
    }
  }

  // dephasing leaves populations untouched, on random states of every preset space
  double diag_change = 0.0;
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  for (const auto& name : preset_names()) {
    const RunConfig c = preset(name);
    for (const auto& space : {c.system.space(), build_space(3)}) {
      const ChannelSet channels = build_channels(space, c.system.model, ChannelToggles::dephasing_only());
      for (int trial = 0; trial < 5; ++trial) {
        Operator a(space.dim(), space.dim());
        for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = Complex(normal(rng), normal(rng));
        Operator rho = a * a.adjoint();
        rho /= rho.trace().real();
        for (const auto& ch : channels.channels) {
          diag_change = std::max(diag_change, apply_dissipator(ch, rho).diagonal().cwiseAbs().maxCoeff());
        }
      }
    }
  }
  const double elapsed = seconds_since(t0);
  const bool pass = worst.trace_deviation < 1e-8 && worst.hermiticity_deviation < 1e-10 &&
                    worst.min_eigenvalue >= -1e-8 && diag_change < 1e-14;
  return {pass, std::to_string(runs) + " preset runs, sanitation off: max |Tr rho - 1| = " +
                    g6(worst.trace_deviation) + ", max |rho - rho^dag| = " + g6(worst.hermiticity_deviation) +
                    ", min eigenvalue = " + g6(worst.min_eigenvalue) +
                    "; dephasing dissipator max |diagonal| = " + g6(diag_change) + runtime_note(elapsed, 0)};
}

// --- 9 -----------------------------------------------------------------------

double swap_asymmetry(const Eigen::MatrixXd& m) { return (m - m.transpose()).cwiseAbs().maxCoeff(); }

Verdict symmetry_and_determinism() {
  const auto t0 = std::chrono::steady_clock::now();
  bool pass = true;
  std::string detail;
  for (const char* name : {"fig3", "fig3_low", "fig4"}) {
    const RunConfig c = preset(name);
    const HeatmapResult h = run_heatmap(c.system, c.heatmap.x, c.heatmap.y, c.integrator, c.sweep);
    const double at = swap_asymmetry(h.t_stab);
    const double ap = swap_asymmetry(h.p_ret);
    const bool sym_censored = h.censored == h.censored.transpose();
    pass = pass && at < 1e-9 && ap < 1e-9 && sym_censored;
    detail += std::string(detail.empty() ? "" : "; ") + name + " " + std::to_string(h.rows()) + "x" +
              std::to_string(h.cols()) + " swap asymmetry T_stab " + g6(at) + ", P_ret " + g6(ap) + ", censored " +
              std::to_string(h.censored_count());
  }

  for (const char* name : {"fig7", "fig4"}) {
    RunConfig c = preset(name);
    c.heatmap.x.points = 9;
    c.heatmap.y.points = 9;
    std::string reference_json, reference_csv;
    bool identical = true;
    for (int threads : {1, 4, 8}) {
      c.sweep.threads = threads;
      const HeatmapResult h = run_heatmap(c.system, c.heatmap.x, c.heatmap.y, c.integrator, c.sweep);
      const Result r = heatmap_result(c, h);
      const std::string json = r.document.dump(2);
      const std::string csv = to_csv(r.table, "heatmap", r.document.at("config"));
      if (threads == 1) {
        reference_json = json;
        reference_csv = csv;
      } else {
        identical = identical && json == reference_json && csv == reference_csv;
      }
    }
    pass = pass && identical;
    detail += std::string("; ") + name + " 9x9 output across 1/4/8 threads " +
              (identical ? "byte-identical" : "DIFFERS");
  }
  const double elapsed = seconds_since(t0);
  return {pass, detail + runtime_note(elapsed, 0)};
}

// --- 10 ----------------------------------------------------------------------

Verdict non_dark_recovery() {
  const auto t0 = std::chrono::steady_clock::now();
  const RunConfig c = preset("fig7");
  const HeatmapResult h = run_heatmap(c.system, c.heatmap.x, c.heatmap.y, c.integrator, c.sweep);
  const double elapsed = seconds_since(t0);
  double p_min = std::numeric_limits<double>::infinity();
  Eigen::Index mi = 0, mj = 0;
  double t_min = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    for (Eigen::Index j = 0; j < h.cols(); ++j) {
      if (h.censored(i, j)) continue;
      p_min = std::min(p_min, h.p_ret(i, j));
      if (h.t_stab(i, j) < t_min) {
        t_min = h.t_stab(i, j);
        mi = i;
        mj = j;
      }
    }
  }
  const bool interior = has_interior_minimum(h.t_stab, h.censored);
  // where the diagonal cut has its minimum, for reference
  Eigen::Index dk = 0;
  for (Eigen::Index k = 1; k < h.rows(); ++k) {
    if (h.t_stab(k, k) < h.t_stab(dk, dk)) dk = k;
  }
  const auto xv = h.x.values();
  const auto yv = h.y.values();
  return {p_min > 0.0 && interior && h.censored_count() < static_cast<std::size_t>(h.censored.size()),
          "min P_ret over non-censored cells " + g6(p_min) + " (censored " + std::to_string(h.censored_count()) +
              "); T_stab interior minimum " + (interior ? "yes" : "no") + ", global minimum " + g6(t_min) +
              " at (gamma_deph1, gamma_deph2) = (" + g6(xv[static_cast<std::size_t>(mi)]) + ", " +
              g6(yv[static_cast<std::size_t>(mj)]) + "), diagonal minimum " + g6(h.t_stab(dk, dk)) + " at gamma " +
              g6(xv[static_cast<std::size_t>(dk)]) + runtime_note(elapsed, 0)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"dark-state stationarity", dark_state_stationarity},
      {"reduced-manifold fidelity asymptote", reduced_fidelity},
      {"anti-Zeno to Zeno crossover", crossover},
      {"retention floor", retention_floor},
      {"k0 threshold", k0_threshold},
      {"oracle equivalence", oracle_equivalence},
      {"convergence orders", convergence_orders},
      {"conservation suite", conservation},
      {"symmetry and determinism", symmetry_and_determinism},
      {"non-dark recovery", non_dark_recovery},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int number = static_cast<int>(k) + 1;
    if (!only.empty() && !only.count(number)) continue;
    Verdict v;
    try {
      v = criteria[k].second();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    if (!v.pass) ++failures;
    std::printf("%s %2d %s: %s\n", v.pass ? "PASS" : "FAIL", number, criteria[k].first.c_str(), v.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
