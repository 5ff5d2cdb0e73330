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

// Subcommands behind the command-line tool. Each one runs, writes its result
// files, prints a one-line summary and maps the outcome to an exit status.

#ifndef DARKZENO_COMMANDS_HPP
#define DARKZENO_COMMANDS_HPP

#include <array>
#include <cstdio>
#include <ostream>
#include <string>
#include <string_view>

#include "darkzeno/config.hpp"
#include "darkzeno/export.hpp"
#include "darkzeno/integrate.hpp"
#include "darkzeno/observables.hpp"
#include "darkzeno/sweep.hpp"

namespace darkzeno {

enum ExitStatus : int {
  exit_ok = 0,
  exit_error = 1,          // bad configuration or a failed computation
  exit_diverged = 2,       // a trajectory or sweep cell diverged
  exit_all_censored = 3,   // no cell reached stationarity
  exit_io_error = 4,
};

inline constexpr std::array<std::string_view, 7> kCommands{"evolve", "heatmap", "diagonal", "gmin",
                                                            "k0scan",  "reduced", "oracle"};

namespace detail {

inline std::string num(double v) {
  if (!std::isfinite(v)) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct Outcome {
  Result result;
  std::string summary;
  int status = exit_ok;
  std::string warning;
};

inline Outcome trajectory_outcome(const RunConfig& config, std::string_view name, const HilbertSpace& space,
                                  const Operator& h, const ChannelSet& channels, const StateVector& target,
                                  std::string_view weight_name) {
  const DensityMatrix rho0 = DensityMatrix::pure(config.system.initial.vector(space, config.system.model));
  const double dt = resolve_dt(config.integrator, config.system.model);
  Outcome o;
  TrajectoryRecord rec;
  try {
    rec = evolve(rho0, h, channels, config.integrator, dt, target, space);
  } catch (const IntegrationDiverged& e) {
    rec = e.partial();
    o.status = exit_diverged;
    o.warning = e.what();
  }
  const RetentionResult r = rec.size() > 1 ? retention_result(rec, Liouvillian(h, channels), kDefaultStationarityEpsilon)
                                           : RetentionResult{};
  o.result = trajectory_result(config, rec, space, r, weight_name);
  o.summary = std::string(name) + ": " + std::to_string(rec.size()) + " records to t=" + num(rec.times.back()) +
              ", final " + std::string(weight_name) + "=" + num(rec.dark_weight.back()) + ", T_stab=" + num(r.t_stab) +
              (r.converged ? "" : " (not converged)") + ", P_ret=" + num(r.p_ret);
  if (rec.leakage_warning) o.warning += (o.warning.empty() ? "" : "; ") + std::string("truncation leakage above 1e-6");
  return o;
}

inline void sweep_status(Outcome& o, std::size_t cells, std::size_t censored, std::size_t diverged) {
  if (diverged > 0) {
    o.status = exit_diverged;
    o.warning = std::to_string(diverged) + " cell(s) diverged";
  } else if (cells > 0 && censored == cells) {
    o.status = exit_all_censored;
    o.warning = "every cell is censored";
  } else if (censored > 0) {
    o.warning = std::to_string(censored) + " censored cell(s)";
  }
}

inline Outcome run(const RunConfig& config, std::string_view command) {
  const SystemSpec& sys = config.system;
  if (command == "evolve") {
    const HilbertSpace space = sys.space();
    const Operator h = build_hamiltonian(space, sys.model);
    return trajectory_outcome(config, command, space, h, build_channels(space, sys.model, sys.channels),
                              dark_state(space, sys.model.g1, sys.model.g2), "dark_weight");
  }
  if (command == "reduced") {
    const HilbertSpace space = reduced_space(sys.space().parent());
    const Operator h = build_hamiltonian(space, sys.model);
    return trajectory_outcome(config, command, space, h, build_channels(space, sys.model, sys.channels),
                              dark_state(space, sys.model.g1, sys.model.g2), "fidelity");
  }
  if (command == "oracle") {
    const HilbertSpace space = sys.space();
    const Operator h = build_hamiltonian(space, sys.model);
    const SteadyState ss = steady_state_oracle(h, build_channels(space, sys.model, sys.channels));
    const double dark = fidelity_to_pure(ss.rho, dark_state(space, sys.model.g1, sys.model.g2));
    Outcome o;
    o.result = oracle_result(config, ss, space, dark);
    o.summary = "oracle: unique steady state, residual=" + num(ss.residual) + ", dark weight=" + num(dark);
    return o;
  }
  if (command == "heatmap") {
    const HeatmapResult hm = run_heatmap(sys, config.heatmap.x, config.heatmap.y, config.integrator, config.sweep);
    Outcome o;
    o.result = heatmap_result(config, hm);
    const auto& s = o.result.document["summary"];
    o.summary = "heatmap " + std::to_string(hm.rows()) + "x" + std::to_string(hm.cols()) + ": T_stab min=" +
                num(s["t_min"].is_null() ? NAN : s["t_min"].get<double>()) + ", P_ret min=" +
                num(s["p_ret_min"].is_null() ? NAN : s["p_ret_min"].get<double>()) +
                ", interior minimum=" + (s["interior_minimum"].get<bool>() ? "yes" : "no") +
                ", censored=" + std::to_string(hm.censored_count());
    sweep_status(o, static_cast<std::size_t>(hm.censored.size()), hm.censored_count(), hm.diverged_count);
    return o;
  }
  if (command == "diagonal") {
    const DiagonalScan d = diagonal_scan(sys, config.diagonal.grid, config.integrator, config.sweep);
    Outcome o;
    o.result = diagonal_result(config, d);
    o.summary = "diagonal " + std::to_string(d.gamma.size()) + " points: " +
                (d.interior_minimum ? "gamma_min=" + num(d.gamma_min) + " MHz, T_min=" + num(d.t_min)
                                    : std::string("no interior minimum")) +
                ", P_ret min=" + num(d.p_ret_min) + ", censored=" + std::to_string(d.censored_count());
    sweep_status(o, d.gamma.size(), d.censored_count(), d.diverged_count);
    return o;
  }
  if (command == "gmin") {
    std::vector<DiagonalScan> scans;
    const auto points = gmin_vs_g(sys, config.gmin.g, config.gmin.grid, config.integrator, config.sweep, &scans);
    Outcome o;
    o.result = gmin_result(config, points, scans);
    std::string list;
    std::size_t cells = 0, censored = 0, diverged = 0;
    for (const auto& p : points) list += (list.empty() ? "" : ", ") + num(p.g) + ":" + num(p.gamma_min);
    for (const auto& s : scans) {
      cells += s.gamma.size();
      censored += s.censored_count();
      diverged += s.diverged_count;
    }
    const auto& pm = o.result.document["summary"]["p_ret_min"];
    o.summary = "gmin " + std::to_string(points.size()) + " couplings: gamma_min (g:gamma) " + list +
                "; P_ret min=" + num(pm.is_null() ? NAN : pm.get<double>());
    sweep_status(o, cells, censored, diverged);
    return o;
  }
  if (command == "k0scan") {
    const ThresholdScan t =
        k0_scan(sys, config.k0scan.g1, config.k0scan.k, config.k0scan.grid, config.integrator, config.sweep);
    Outcome o;
    o.result = k0_result(config, t);
    std::string list;
    for (std::size_t i = 0; i < t.g1.size(); ++i) {
      list += (list.empty() ? "" : ", ") + num(t.g1[i]) + ":" + (t.k0[i] ? num(*t.k0[i]) : "not bracketed");
    }
    o.summary = "k0scan: k0 (g1:k0) " + list;
    sweep_status(o, 0, 0, t.diverged_count);
    return o;
  }
  throw Error(ErrorCode::invalid_argument, "unknown command '" + std::string(command) + "'");
}

}  // namespace detail

/// Runs `command`, writes <output.dir>/<command>.{csv,json} and returns the
/// exit status. The summary goes to `out`, warnings and errors to `err`.
inline int run_command(const RunConfig& config, std::string_view command, std::ostream& out, std::ostream& err) {
  try {
    detail::Outcome o = detail::run(config, command);
    export_results(o.result.table, o.result.document, command, config.output);
    out << o.summary << "\n";
    if (!o.warning.empty()) err << "warning: " << o.warning << "\n";
    return o.status;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return e.code() == ErrorCode::io_error ? exit_io_error : exit_error;
  }
}

}  // namespace darkzeno

#endif  // DARKZENO_COMMANDS_HPP
