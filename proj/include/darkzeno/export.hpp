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

// Result files.
//
// Every result is a Table (one CSV row per record, cell or grid point) plus a
// JSON document with the fields
//   {config, axes, grids: {raw, normalized}, censored, summary, diagnostics}.
// Both embed the run configuration minus the execution-only settings
// (sweep.threads and the output block), so a result file depends on nothing
// but the physics and numerics it was computed with. Numbers in CSV use 17
// significant digits; nothing time- or host-dependent is written.

#ifndef DARKZENO_EXPORT_HPP
#define DARKZENO_EXPORT_HPP

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "darkzeno/config.hpp"
#include "darkzeno/core.hpp"
#include "darkzeno/integrate.hpp"
#include "darkzeno/sweep.hpp"

namespace darkzeno {

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  static std::string cell(double v) { return format_number(v); }
  static std::string cell(bool v) { return v ? "1" : "0"; }
  static std::string cell(std::size_t v) { return std::to_string(v); }
  static std::string cell(std::string_view v) { return std::string(v); }
};

/// The configuration as embedded in result files.
inline Json result_config(const RunConfig& c) {
  Json j = to_json(c);
  j["sweep"].erase("threads");
  j.erase("output");
  return j;
}

inline std::string basis_label(const BasisState& s) {
  return std::to_string(s.n_ph) + std::to_string(s.s1) + std::to_string(s.s2);
}

inline std::string to_csv(const Table& t, std::string_view command, const Json& config) {
  std::ostringstream out;
  out << "# darkzeno " << command << "\n";
  out << "# units: rates and couplings in MHz, times in 1/MHz (1/MHz = 1 us)\n";
  out << "# config: " << config.dump() << "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
  out << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << "\n";
  }
  return out.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::io_error, "cannot open '" + path.string() + "' for writing");
  f << content;
  f.close();
  if (!f) throw Error(ErrorCode::io_error, "failed writing '" + path.string() + "'");
}

inline void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::io_error, "cannot create output directory '" + dir.string() + "'" +
                                         (ec ? ": " + ec.message() : std::string()));
  }
}

/// Writes <dir>/<stem>.csv and/or <dir>/<stem>.json; returns the paths written.
inline std::vector<std::string> export_results(const Table& table, const Json& document, std::string_view stem,
                                               const OutputBlock& output) {
  if (table.rows.empty()) throw Error(ErrorCode::invalid_input, "nothing to export for " + std::string(stem));
  const std::filesystem::path dir(output.dir);
  ensure_directory(dir);
  std::vector<std::string> written;
  for (const auto& format : output.formats) {
    const auto path = dir / (std::string(stem) + "." + format);
    if (format == "csv") {
      write_file(path, to_csv(table, stem, document.at("config")));
    } else if (format == "json") {
      write_file(path, document.dump(2) + "\n");
    } else {
      throw Error(ErrorCode::invalid_argument, "unknown output format '" + format + "'");
    }
    written.push_back(path.string());
  }
  return written;
}

// ---------------------------------------------------------------------------
// Result documents

namespace detail {

inline Json grid_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Json grid_json(const BoolGrid& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(static_cast<bool>(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Json diagnostics_json(const Diagnostics& d) {
  return {{"trace_deviation", d.trace_deviation},
          {"hermiticity_deviation", d.hermiticity_deviation},
          {"min_eigenvalue", d.min_eigenvalue},
          {"truncation_leakage", d.truncation_leakage}};
}

inline Json optional_number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json empty_summary() {
  return {{"gamma_min", nullptr}, {"t_min", nullptr}, {"p_ret_min", nullptr}, {"k0", nullptr}};
}

inline Json document(const RunConfig& config) {
  return {{"config", result_config(config)},
          {"axes", Json::object()},
          {"grids", {{"raw", Json::object()}, {"normalized", Json::object()}}},
          {"censored", Json::array()},
          {"summary", empty_summary()},
          {"diagnostics", Json::object()}};
}

}  // namespace detail

struct Result {
  Table table;
  Json document;
};

/// Trajectory: one row per record.
inline Result trajectory_result(const RunConfig& config, const TrajectoryRecord& rec, const HilbertSpace& space,
                                const RetentionResult& retention, std::string_view weight_name = "dark_weight") {
  Result r;
  r.table.columns = {"t", std::string(weight_name)};
  for (const auto& s : space.states()) r.table.columns.push_back("p_" + basis_label(s));
  for (const char* c : {"trace_deviation", "hermiticity_deviation", "min_eigenvalue", "truncation_leakage"}) {
    r.table.columns.push_back(c);
  }
  Json pops = Json::object();
  for (const auto& s : space.states()) pops["p_" + basis_label(s)] = Json::array();
  Diagnostics worst;
  worst.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < rec.size(); ++k) {
    std::vector<std::string> row{Table::cell(rec.times[k]), Table::cell(rec.dark_weight[k])};
    for (int i = 0; i < space.dim(); ++i) {
      row.push_back(Table::cell(rec.populations[k](i)));
      pops["p_" + basis_label(space.state_of(i))].push_back(rec.populations[k](i));
    }
    const auto& d = rec.diagnostics[k];
    for (double v : {d.trace_deviation, d.hermiticity_deviation, d.min_eigenvalue, d.truncation_leakage}) {
      row.push_back(Table::cell(v));
    }
    detail::merge_worst(worst, d);
    r.table.rows.push_back(std::move(row));
  }
  r.document = detail::document(config);
  r.document["axes"] = {{"t", rec.times}};
  r.document["grids"]["raw"] = {{std::string(weight_name), rec.dark_weight}, {"populations", pops}};
  r.document["summary"]["t_stab"] = retention.t_stab;
  r.document["summary"]["p_ret"] = retention.p_ret;
  r.document["summary"]["converged"] = retention.converged;
  r.document["summary"]["final_" + std::string(weight_name)] = rec.dark_weight.empty() ? 0.0 : rec.dark_weight.back();
  r.document["diagnostics"] = detail::diagnostics_json(worst);
  r.document["diagnostics"]["monitor_warning"] = rec.monitor_warning;
  r.document["diagnostics"]["leakage_warning"] = rec.leakage_warning;
  r.document["diagnostics"]["dt"] = rec.dt;
  return r;
}

/// Heatmap: one row per cell, x-major.
inline Result heatmap_result(const RunConfig& config, const HeatmapResult& h) {
  Result r;
  const std::string xn(to_string(h.x.param));
  const std::string yn(to_string(h.y.param));
  r.table.columns = {xn, yn, "t_stab", "p_ret", "censored", "t_stab_normalized", "p_ret_normalized"};
  const bool any = h.censored_count() < static_cast<std::size_t>(h.censored.size());
  const Eigen::MatrixXd tn = any ? normalize_heatmap(h.t_stab, h.censored).values
                                 : Eigen::MatrixXd::Constant(h.rows(), h.cols(), std::nan(""));
  const Eigen::MatrixXd pn = any ? normalize_heatmap(h.p_ret, h.censored).values
                                 : Eigen::MatrixXd::Constant(h.rows(), h.cols(), std::nan(""));
  const auto xv = h.x.values();
  const auto yv = h.y.values();
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    for (Eigen::Index j = 0; j < h.cols(); ++j) {
      r.table.rows.push_back({Table::cell(xv[static_cast<std::size_t>(i)]), Table::cell(yv[static_cast<std::size_t>(j)]),
                              Table::cell(h.t_stab(i, j)), Table::cell(h.p_ret(i, j)),
                              Table::cell(static_cast<bool>(h.censored(i, j))), Table::cell(tn(i, j)),
                              Table::cell(pn(i, j))});
    }
  }
  r.document = detail::document(config);
  r.document["axes"] = {{"x", {{"param", xn}, {"values", xv}}}, {"y", {{"param", yn}, {"values", yv}}}};
  r.document["grids"]["raw"] = {{"t_stab", detail::grid_json(h.t_stab)}, {"p_ret", detail::grid_json(h.p_ret)}};
  r.document["grids"]["normalized"] = {
      {"t_stab", detail::grid_json(tn)},
      {"p_ret", detail::grid_json(pn)},
      {"t_stab_range", {h.t_stab_norm.min, h.t_stab_norm.max}},
      {"p_ret_range", {h.p_ret_norm.min, h.p_ret_norm.max}}};
  r.document["censored"] = detail::grid_json(h.censored);
  double p_min = std::numeric_limits<double>::infinity();
  double t_min = p_min;
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    for (Eigen::Index j = 0; j < h.cols(); ++j) {
      if (h.censored(i, j)) continue;
      p_min = std::min(p_min, h.p_ret(i, j));
      t_min = std::min(t_min, h.t_stab(i, j));
    }
  }
  r.document["summary"]["t_min"] = detail::optional_number(t_min);
  r.document["summary"]["p_ret_min"] = detail::optional_number(p_min);
  r.document["summary"]["interior_minimum"] = any && has_interior_minimum(h.t_stab, h.censored);
  r.document["diagnostics"] = detail::diagnostics_json(h.worst);
  r.document["diagnostics"]["leakage_warning"] = h.leakage_warning;
  r.document["diagnostics"]["censored_count"] = h.censored_count();
  r.document["diagnostics"]["diverged_count"] = h.diverged_count;
  return r;
}

/// Diagonal scan: one row per gamma.
inline Result diagonal_result(const RunConfig& config, const DiagonalScan& d) {
  Result r;
  r.table.columns = {"gamma_deph", "t_stab", "p_ret", "censored", "regime"};
  for (std::size_t i = 0; i < d.gamma.size(); ++i) {
    r.table.rows.push_back({Table::cell(d.gamma[i]), Table::cell(d.t_stab[i]), Table::cell(d.p_ret[i]),
                            Table::cell(static_cast<bool>(d.censored[i])), Table::cell(to_string(d.regime[i]))});
  }
  Json regimes = Json::array();
  for (auto g : d.regime) regimes.push_back(std::string(to_string(g)));
  r.document = detail::document(config);
  r.document["axes"] = {{"gamma_deph", d.gamma}};
  r.document["grids"]["raw"] = {{"t_stab", d.t_stab}, {"p_ret", d.p_ret}, {"regime", regimes}};
  r.document["censored"] = d.censored;
  r.document["summary"]["gamma_min"] = d.interior_minimum ? Json(d.gamma_min) : Json(nullptr);
  r.document["summary"]["t_min"] = d.interior_minimum ? Json(d.t_min) : Json(nullptr);
  r.document["summary"]["p_ret_min"] = detail::optional_number(d.p_ret_min);
  r.document["summary"]["p_ret_at_min"] = d.interior_minimum ? Json(d.p_ret_at_min) : Json(nullptr);
  r.document["summary"]["interior_minimum"] = d.interior_minimum;
  r.document["diagnostics"] = detail::diagnostics_json(d.worst);
  r.document["diagnostics"]["leakage_warning"] = d.leakage_warning;
  r.document["diagnostics"]["censored_count"] = d.censored_count();
  r.document["diagnostics"]["diverged_count"] = d.diverged_count;
  return r;
}

/// gamma_min against g: one row per coupling.
inline Result gmin_result(const RunConfig& config, const std::vector<GminPoint>& points,
                          const std::vector<DiagonalScan>& scans) {
  Result r;
  r.table.columns = {"g", "gamma_min", "t_min", "p_ret_at_min", "p_ret_min", "interior_minimum"};
  Json g = Json::array(), gm = Json::array(), tm = Json::array(), pa = Json::array(), pm = Json::array(),
       im = Json::array();
  double p_floor = std::numeric_limits<double>::infinity();
  std::size_t diverged = 0;
  for (const auto& p : points) {
    r.table.rows.push_back({Table::cell(p.g), Table::cell(p.gamma_min), Table::cell(p.t_min),
                            Table::cell(p.p_ret_at_min), Table::cell(p.p_ret_min), Table::cell(p.interior_minimum)});
    g.push_back(p.g);
    gm.push_back(detail::optional_number(p.gamma_min));
    tm.push_back(detail::optional_number(p.t_min));
    pa.push_back(detail::optional_number(p.p_ret_at_min));
    pm.push_back(detail::optional_number(p.p_ret_min));
    im.push_back(p.interior_minimum);
    if (std::isfinite(p.p_ret_min)) p_floor = std::min(p_floor, p.p_ret_min);
    diverged += p.diverged_count;
  }
  Diagnostics worst;
  worst.min_eigenvalue = std::numeric_limits<double>::infinity();
  bool leakage = false;
  std::size_t censored = 0;
  for (const auto& s : scans) {
    detail::merge_worst(worst, s.worst);
    leakage = leakage || s.leakage_warning;
    censored += s.censored_count();
  }
  r.document = detail::document(config);
  r.document["axes"] = {{"g", g}};
  r.document["grids"]["raw"] = {{"gamma_min", gm}, {"t_min", tm}, {"p_ret_at_min", pa}, {"p_ret_min", pm},
                                {"interior_minimum", im}};
  r.document["summary"]["gamma_min"] = gm;
  r.document["summary"]["t_min"] = tm;
  r.document["summary"]["p_ret_min"] = detail::optional_number(p_floor);
  r.document["diagnostics"] = detail::diagnostics_json(worst);
  r.document["diagnostics"]["leakage_warning"] = leakage;
  r.document["diagnostics"]["censored_count"] = censored;
  r.document["diagnostics"]["diverged_count"] = diverged;
  return r;
}

/// k0 scan: one row per (g1, k) with the classification and that g1's k0.
inline Result k0_result(const RunConfig& config, const ThresholdScan& s) {
  Result r;
  r.table.columns = {"g1", "k", "pattern", "k0"};
  Json patterns = Json::array(), k0 = Json::array();
  for (std::size_t i = 0; i < s.g1.size(); ++i) {
    Json row = Json::array();
    const double k0i = s.k0[i] ? *s.k0[i] : std::nan("");
    for (std::size_t j = 0; j < s.k.size(); ++j) {
      r.table.rows.push_back(
          {Table::cell(s.g1[i]), Table::cell(s.k[j]), Table::cell(to_string(s.pattern[i][j])), Table::cell(k0i)});
      row.push_back(std::string(to_string(s.pattern[i][j])));
    }
    patterns.push_back(std::move(row));
    k0.push_back(detail::optional_number(k0i));
  }
  r.document = detail::document(config);
  r.document["axes"] = {{"g1", s.g1}, {"k", s.k}};
  r.document["grids"]["raw"] = {{"pattern", patterns}};
  r.document["summary"]["k0"] = k0;
  r.document["summary"]["bracketed"] = s.bracketed;
  r.document["diagnostics"]["diverged_count"] = s.diverged_count;
  return r;
}

/// Steady state: one row per density-matrix entry.
inline Result oracle_result(const RunConfig& config, const SteadyState& ss, const HilbertSpace& space,
                            double dark_weight) {
  Result r;
  r.table.columns = {"row", "col", "re", "im"};
  Eigen::MatrixXd re = ss.rho.real();
  Eigen::MatrixXd im = ss.rho.imag();
  Json labels = Json::array();
  for (const auto& s : space.states()) labels.push_back(basis_label(s));
  for (Eigen::Index i = 0; i < ss.rho.rows(); ++i) {
    for (Eigen::Index j = 0; j < ss.rho.cols(); ++j) {
      r.table.rows.push_back({basis_label(space.state_of(static_cast<int>(i))),
                              basis_label(space.state_of(static_cast<int>(j))), Table::cell(re(i, j)),
                              Table::cell(im(i, j))});
    }
  }
  std::vector<double> pops;
  for (Eigen::Index i = 0; i < ss.rho.rows(); ++i) pops.push_back(re(i, i));
  r.document = detail::document(config);
  r.document["axes"] = {{"basis", labels}};
  r.document["grids"]["raw"] = {{"re", detail::grid_json(re)}, {"im", detail::grid_json(im)}, {"populations", pops}};
  r.document["summary"]["residual"] = ss.residual;
  r.document["summary"]["multiplicity"] = ss.multiplicity;
  r.document["summary"]["dark_weight"] = dark_weight;
  return r;
}

}  // namespace darkzeno

#endif  // DARKZENO_EXPORT_HPP
