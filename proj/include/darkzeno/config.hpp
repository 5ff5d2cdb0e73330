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

// Run configuration as JSON.
//
//   {
//     "preset": "fig4",                     optional, fills every block below
//     "model": {"omega", "g1", "g2", "gamma_out", "gamma_in",
//               "gamma_deph1", "gamma_deph2", "interaction_picture"},
//     "space": {"n_max", "max_excitations"},
//     "channels": {"out", "in", "deph1", "deph2"},
//     "initial": "dark(0)" | "ket(0,0,1)" | {"explicit": [[re, im], ...]},
//     "integrator": {"method", "dt", "t_end", "sanitize", "record_stride",
//                    "monitor_tol", "stepping"},
//     "sweep": {"epsilon", "max_t_end", "samples", "threads"},
//     "heatmap": {"x": axis, "y": axis},
//     "diagonal": {"grid": [segment, ...]},
//     "gmin": {"g": [...], "grid": [segment, ...]},
//     "k0scan": {"g1": [...], "k": axis, "grid": [segment, ...]},
//     "output": {"dir", "formats"}
//   }
//
// axis = {"param", "min", "max", "points"}, segment = {"min", "max", "points"}.
// Rates and couplings are in MHz, times in 1/MHz (= microseconds).
//
// Keys given next to a preset override it. Without a preset, "model" and
// "initial" are required. Unknown keys are rejected with their full path.

#ifndef DARKZENO_CONFIG_HPP
#define DARKZENO_CONFIG_HPP

#include <cmath>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "darkzeno/core.hpp"
#include "darkzeno/integrate.hpp"
#include "darkzeno/model.hpp"
#include "darkzeno/observables.hpp"
#include "darkzeno/sweep.hpp"

namespace darkzeno {

using Json = nlohmann::json;

struct HeatmapBlock {
  AxisSpec x{AxisParam::gamma_deph1, 0.0, 200.0, 41};
  AxisSpec y{AxisParam::gamma_deph2, 0.0, 200.0, 41};
  bool operator==(const HeatmapBlock&) const = default;
};

struct DiagonalBlock {
  SegmentedGrid grid = SegmentedGrid::linear(0.0, 200.0, 81);
  bool operator==(const DiagonalBlock&) const = default;
};

struct GminBlock {
  std::vector<double> g{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  SegmentedGrid grid = SegmentedGrid::linear(0.0, 40.0, 81);
  bool operator==(const GminBlock&) const = default;
};

struct K0Block {
  std::vector<double> g1{10, 20, 30, 40, 50};
  AxisSpec k{AxisParam::k_g, 1.0, 3.0, 21};
  SegmentedGrid grid = SegmentedGrid::linear(0.0, 0.2, 41);
  bool operator==(const K0Block&) const = default;
};

struct OutputBlock {
  std::string dir = ".";
  std::vector<std::string> formats{"csv", "json"};
  bool operator==(const OutputBlock&) const = default;
};

struct RunConfig {
  std::optional<std::string> preset;
  SystemSpec system;
  IntegratorConfig integrator;
  SweepConfig sweep;
  HeatmapBlock heatmap;
  DiagonalBlock diagonal;
  GminBlock gmin;
  K0Block k0scan;
  OutputBlock output;

  bool operator==(const RunConfig&) const = default;
};

// ---------------------------------------------------------------------------
// Presets

namespace detail {

inline RunConfig preset_base() {
  RunConfig c;
  c.system.n_max = 1;
  c.system.max_excitations = 1;
  c.system.model.omega = 1000.0;
  c.system.initial = InitialState::dark(0);
  c.integrator.t_end = 10.0;
  c.integrator.record_stride = 1000;
  c.integrator.stepping = Stepping::propagator;
  return c;
}

inline void set_rates(ModelParams& m, double g1, double g2, double out, double in, double deph1, double deph2) {
  m.g1 = g1;
  m.g2 = g2;
  m.gamma_out = out;
  m.gamma_in = in;
  m.gamma_deph1 = deph1;
  m.gamma_deph2 = deph2;
}

}  // namespace detail

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"fig1", "fig2a", "fig2b", "fig2c", "fig3", "fig3_low", "fig4", "fig5",
                                              "fig6", "fig7", "fig8", "fig9", "fig10"};
  return names;
}

inline RunConfig preset(std::string_view name) {
  RunConfig c = detail::preset_base();
  c.preset = std::string(name);
  ModelParams& m = c.system.model;
  auto low_heatmap = [&c] {
    c.heatmap.x.max = 0.2;
    c.heatmap.y.max = 0.2;
  };
  if (name == "fig1" || name == "fig2a" || name == "fig2b" || name == "fig2c") {
    detail::set_rates(m, 30, 50, 20, 10, 20, 20);
    if (name == "fig2a") c.system.channels = ChannelToggles::dephasing_only();
    if (name == "fig2b") c.system.channels = ChannelToggles::outflow_and_dephasing();
  } else if (name == "fig3" || name == "fig3_low") {
    detail::set_rates(m, 30, 30, 10, 3, 20, 20);
    if (name == "fig3_low") low_heatmap();
  } else if (name == "fig4" || name == "fig5") {
    detail::set_rates(m, 2, 2, 10, 3, 5, 5);
    c.diagonal.grid = SegmentedGrid{{{0.0, 0.2, 41}, {0.2, 200.0, 41}}};
  } else if (name == "fig6") {
    detail::set_rates(m, 30, 54, 10, 8, 20, 20);
    c.system.initial = InitialState::basis(0, 0, 1);
  } else if (name == "fig7") {
    detail::set_rates(m, 30, 70, 10, 8, 20, 20);
    c.system.initial = InitialState::basis(0, 0, 1);
  } else if (name == "fig8") {
    detail::set_rates(m, 30, 70, 10, 8, 20, 20);
    c.system.initial = InitialState::basis(0, 0, 1);
    c.heatmap.x = {AxisParam::mu, 0.1, 0.9, 41};
    c.heatmap.y = {AxisParam::gamma_deph, 0.0, 200.0, 41};
  } else if (name == "fig9") {
    detail::set_rates(m, 30, 54, 10, 8, 20, 20);
    c.system.initial = InitialState::basis(0, 0, 1);
    low_heatmap();
  } else if (name == "fig10") {
    detail::set_rates(m, 30, 30, 0, 0, 20, 20);
    c.system.channels = ChannelToggles::dephasing_only();
    c.integrator.t_end = 2.0;
  } else {
    std::string known;
    for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
    throw Error(ErrorCode::parse_error, "preset: unknown preset '" + std::string(name) + "' (known: " + known + ")");
  }
  return c;
}

// ---------------------------------------------------------------------------
// Initial-state strings

inline InitialState parse_initial(const std::string& text, const std::string& path = "initial") {
  static const std::regex dark_re(R"(\s*dark\(\s*(\d+)\s*\)\s*)");
  static const std::regex ket_re(R"(\s*ket\(\s*(\d+)\s*,\s*([01])\s*,\s*([01])\s*\)\s*)");
  std::smatch m;
  if (std::regex_match(text, m, dark_re)) return InitialState::dark(std::stoi(m[1]));
  if (std::regex_match(text, m, ket_re)) return InitialState::basis(std::stoi(m[1]), std::stoi(m[2]), std::stoi(m[3]));
  throw Error(ErrorCode::parse_error, path + ": expected dark(n), ket(n,s1,s2) or {\"explicit\": [...]}, got '" + text + "'");
}

// ---------------------------------------------------------------------------
// Serialization

namespace detail {

inline Json to_json(const AxisSpec& a) {
  return {{"param", std::string(to_string(a.param))}, {"min", a.min}, {"max", a.max}, {"points", a.points}};
}

inline Json to_json(const SegmentedGrid& g) {
  Json out = Json::array();
  for (const auto& s : g.segments) out.push_back({{"min", s.min}, {"max", s.max}, {"points", s.points}});
  return out;
}

inline Json to_json(const InitialState& s) {
  if (s.kind != InitialState::Kind::amplitudes) return to_string(s);
  Json amps = Json::array();
  for (const auto& a : s.amplitudes) amps.push_back({a.real(), a.imag()});
  return {{"explicit", amps}};
}

template <typename T>
Json optional_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

}  // namespace detail

inline Json to_json(const RunConfig& c) {
  const auto& m = c.system.model;
  const auto& ch = c.system.channels;
  const auto& in = c.integrator;
  Json j;
  if (c.preset) j["preset"] = *c.preset;
  j["model"] = {{"omega", m.omega},
                {"g1", m.g1},
                {"g2", m.g2},
                {"gamma_out", m.gamma_out},
                {"gamma_in", m.gamma_in},
                {"gamma_deph1", m.gamma_deph1},
                {"gamma_deph2", m.gamma_deph2},
                {"interaction_picture", m.interaction_picture}};
  j["space"] = {{"n_max", c.system.n_max}, {"max_excitations", detail::optional_json(c.system.max_excitations)}};
  j["channels"] = {{"out", ch.out}, {"in", ch.in}, {"deph1", ch.deph1}, {"deph2", ch.deph2}};
  j["initial"] = detail::to_json(c.system.initial);
  j["integrator"] = {{"method", std::string(to_string(in.method))},
                     {"dt", detail::optional_json(in.dt)},
                     {"t_end", in.t_end},
                     {"sanitize", detail::optional_json(in.sanitize)},
                     {"record_stride", in.record_stride},
                     {"monitor_tol", in.monitor_tol},
                     {"stepping", std::string(to_string(in.stepping))}};
  j["sweep"] = {{"epsilon", c.sweep.epsilon},
                {"max_t_end", c.sweep.max_t_end},
                {"samples", c.sweep.samples},
                {"threads", c.sweep.threads}};
  j["heatmap"] = {{"x", detail::to_json(c.heatmap.x)}, {"y", detail::to_json(c.heatmap.y)}};
  j["diagonal"] = {{"grid", detail::to_json(c.diagonal.grid)}};
  j["gmin"] = {{"g", c.gmin.g}, {"grid", detail::to_json(c.gmin.grid)}};
  j["k0scan"] = {{"g1", c.k0scan.g1}, {"k", detail::to_json(c.k0scan.k)}, {"grid", detail::to_json(c.k0scan.grid)}};
  j["output"] = {{"dir", c.output.dir}, {"formats", c.output.formats}};
  return j;
}

inline std::string serialize(const RunConfig& c) { return to_json(c).dump(2); }

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

inline std::string join_path(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

[[noreturn]] inline void parse_fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::parse_error, path + ": " + what);
}

inline const Json& require_object(const Json& j, const std::string& path, std::initializer_list<std::string_view> keys) {
  if (!j.is_object()) parse_fail(path, "expected an object");
  for (const auto& [k, v] : j.items()) {
    bool known = false;
    for (auto allowed : keys) known = known || allowed == k;
    if (!known) parse_fail(join_path(path, k), "unknown key");
  }
  return j;
}

inline double read_number(const Json& j, const std::string& path) {
  if (!j.is_number()) parse_fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) parse_fail(path, "expected a finite number");
  return v;
}

inline int read_int(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) parse_fail(path, "expected an integer");
  return j.get<int>();
}

inline bool read_bool(const Json& j, const std::string& path) {
  if (!j.is_boolean()) parse_fail(path, "expected true or false");
  return j.get<bool>();
}

inline std::string read_string(const Json& j, const std::string& path) {
  if (!j.is_string()) parse_fail(path, "expected a string");
  return j.get<std::string>();
}

inline std::vector<double> read_numbers(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) parse_fail(path, "expected a non-empty array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(read_number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

template <typename F>
void with_key(const Json& obj, const std::string& path, const char* key, F&& f) {
  if (obj.contains(key)) f(obj.at(key), join_path(path, key));
}

inline void read_rate(const Json& obj, const std::string& path, const char* key, double& into) {
  with_key(obj, path, key, [&](const Json& v, const std::string& p) {
    into = read_number(v, p);
    if (into < 0.0) parse_fail(p, "negative rate");
  });
}

inline AxisSpec read_axis(const Json& j, const std::string& path, AxisSpec axis) {
  require_object(j, path, {"param", "min", "max", "points"});
  with_key(j, path, "param", [&](const Json& v, const std::string& p) {
    const auto name = read_string(v, p);
    const auto param = axis_param_from_string(name);
    if (!param) parse_fail(p, "unknown axis parameter '" + name + "'");
    axis.param = *param;
  });
  with_key(j, path, "min", [&](const Json& v, const std::string& p) { axis.min = read_number(v, p); });
  with_key(j, path, "max", [&](const Json& v, const std::string& p) { axis.max = read_number(v, p); });
  with_key(j, path, "points", [&](const Json& v, const std::string& p) { axis.points = read_int(v, p); });
  if (!(axis.min < axis.max)) parse_fail(path, "min must be below max");
  if (axis.points < 2) parse_fail(join_path(path, "points"), "needs at least 2 points");
  return axis;
}

inline SegmentedGrid read_grid(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) parse_fail(path, "expected a non-empty array of segments");
  SegmentedGrid grid;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto p = path + "[" + std::to_string(i) + "]";
    const AxisSpec a = read_axis(j[i], p, AxisSpec{AxisParam::gamma_deph, 0.0, 1.0, 2});
    if (j[i].contains("param")) parse_fail(join_path(p, "param"), "unknown key");
    grid.segments.push_back({a.min, a.max, a.points});
  }
  try {
    (void)grid.values();
  } catch (const Error& e) {
    parse_fail(path, e.what());
  }
  return grid;
}

inline InitialState read_initial(const Json& j, const std::string& path) {
  if (j.is_string()) return parse_initial(j.get<std::string>(), path);
  require_object(j, path, {"explicit"});
  if (!j.contains("explicit")) parse_fail(path, "expected dark(n), ket(n,s1,s2) or {\"explicit\": [...]}");
  const Json& arr = j.at("explicit");
  const auto p = join_path(path, "explicit");
  if (!arr.is_array() || arr.empty()) parse_fail(p, "expected a non-empty array of [re, im] pairs");
  std::vector<Complex> amps;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto pi = p + "[" + std::to_string(i) + "]";
    if (arr[i].is_number()) {
      amps.emplace_back(read_number(arr[i], pi), 0.0);
    } else if (arr[i].is_array() && arr[i].size() == 2) {
      amps.emplace_back(read_number(arr[i][0], pi + "[0]"), read_number(arr[i][1], pi + "[1]"));
    } else {
      parse_fail(pi, "expected a number or an [re, im] pair");
    }
  }
  return InitialState::explicit_amplitudes(std::move(amps));
}

}  // namespace detail

/// Validated RunConfig from a JSON document (see the file comment for keys).
inline RunConfig parse_config_json(const Json& doc) {
  using namespace detail;
  require_object(doc, "", {"preset", "model", "space", "channels", "initial", "integrator", "sweep", "heatmap",
                           "diagonal", "gmin", "k0scan", "output"});
  RunConfig c;
  if (doc.contains("preset") && !doc.at("preset").is_null()) {
    c = preset(read_string(doc.at("preset"), "preset"));
  } else {
    if (!doc.contains("model")) parse_fail("model", "missing required key (no preset given)");
    if (!doc.contains("initial")) parse_fail("initial", "missing required key (no preset given)");
  }

  with_key(doc, "", "model", [&](const Json& j, const std::string& path) {
    require_object(j, path,
                   {"omega", "g1", "g2", "gamma_out", "gamma_in", "gamma_deph1", "gamma_deph2", "interaction_picture"});
    auto& m = c.system.model;
    with_key(j, path, "omega", [&](const Json& v, const std::string& p) { m.omega = read_number(v, p); });
    with_key(j, path, "g1", [&](const Json& v, const std::string& p) { m.g1 = read_number(v, p); });
    with_key(j, path, "g2", [&](const Json& v, const std::string& p) { m.g2 = read_number(v, p); });
    read_rate(j, path, "gamma_out", m.gamma_out);
    read_rate(j, path, "gamma_in", m.gamma_in);
    read_rate(j, path, "gamma_deph1", m.gamma_deph1);
    read_rate(j, path, "gamma_deph2", m.gamma_deph2);
    with_key(j, path, "interaction_picture",
             [&](const Json& v, const std::string& p) { m.interaction_picture = read_bool(v, p); });
  });

  with_key(doc, "", "space", [&](const Json& j, const std::string& path) {
    require_object(j, path, {"n_max", "max_excitations"});
    with_key(j, path, "n_max", [&](const Json& v, const std::string& p) {
      c.system.n_max = read_int(v, p);
      if (c.system.n_max < 1) parse_fail(p, "must be at least 1");
    });
    with_key(j, path, "max_excitations", [&](const Json& v, const std::string& p) {
      if (v.is_null()) {
        c.system.max_excitations.reset();
      } else {
        c.system.max_excitations = read_int(v, p);
        if (*c.system.max_excitations < 0) parse_fail(p, "must be non-negative");
      }
    });
  });

  with_key(doc, "", "channels", [&](const Json& j, const std::string& path) {
    require_object(j, path, {"out", "in", "deph1", "deph2"});
    auto& t = c.system.channels;
    with_key(j, path, "out", [&](const Json& v, const std::string& p) { t.out = read_bool(v, p); });
    with_key(j, path, "in", [&](const Json& v, const std::string& p) { t.in = read_bool(v, p); });
    with_key(j, path, "deph1", [&](const Json& v, const std::string& p) { t.deph1 = read_bool(v, p); });
    with_key(j, path, "deph2", [&](const Json& v, const std::string& p) { t.deph2 = read_bool(v, p); });
  });

  with_key(doc, "", "initial",
           [&](const Json& j, const std::string& path) { c.system.initial = read_initial(j, path); });

  with_key(doc, "", "integrator", [&](const Json& j, const std::string& path) {
    require_object(j, path, {"method", "dt", "t_end", "sanitize", "record_stride", "monitor_tol", "stepping"});
    auto& in = c.integrator;
    with_key(j, path, "method", [&](const Json& v, const std::string& p) {
      const auto s = read_string(v, p);
      if (s == "rk4") {
        in.method = Method::rk4;
      } else if (s == "euler_split") {
        in.method = Method::euler_split;
      } else {
        parse_fail(p, "expected rk4 or euler_split, got '" + s + "'");
      }
    });
    with_key(j, path, "dt", [&](const Json& v, const std::string& p) {
      if (v.is_null()) {
        in.dt.reset();
        return;
      }
      in.dt = read_number(v, p);
      if (*in.dt <= 0.0) parse_fail(p, "must be positive");
    });
    with_key(j, path, "t_end", [&](const Json& v, const std::string& p) {
      in.t_end = read_number(v, p);
      if (in.t_end <= 0.0) parse_fail(p, "must be positive");
    });
    with_key(j, path, "sanitize", [&](const Json& v, const std::string& p) {
      if (v.is_null()) {
        in.sanitize.reset();
      } else {
        in.sanitize = read_bool(v, p);
      }
    });
    with_key(j, path, "record_stride", [&](const Json& v, const std::string& p) {
      in.record_stride = read_int(v, p);
      if (in.record_stride < 1) parse_fail(p, "must be at least 1");
    });
    with_key(j, path, "monitor_tol", [&](const Json& v, const std::string& p) {
      in.monitor_tol = read_number(v, p);
      if (in.monitor_tol <= 0.0) parse_fail(p, "must be positive");
    });
    with_key(j, path, "stepping", [&](const Json& v, const std::string& p) {
      const auto s = read_string(v, p);
      if (s == "direct") {
        in.stepping = Stepping::direct;
      } else if (s == "propagator") {
        in.stepping = Stepping::propagator;
      } else {
        parse_fail(p, "expected direct or propagator, got '" + s + "'");
      }
    });
  });

  with_key(doc, "", "sweep", [&](const Json& j, const std::string& path) {
    require_object(j, path, {"epsilon", "max_t_end", "samples", "threads"});
    auto& s = c.sweep;
    with_key(j, path, "epsilon", [&](const Json& v, const std::string& p) {
      s.epsilon = read_number(v, p);
      if (s.epsilon <= 0.0) parse_fail(p, "must be positive");
    });
    with_key(j, path, "max_t_end", [&](const Json& v, const std::string& p) {
      s.max_t_end = read_number(v, p);
      if (s.max_t_end <= 0.0) parse_fail(p, "must be positive");
    });
    with_key(j, path, "samples", [&](const Json& v, const std::string& p) {
      s.samples = read_int(v, p);
      if (s.samples < 1) parse_fail(p, "must be at least 1");
    });
    with_key(j, path, "threads", [&](const Json& v, const std::string& p) {
      s.threads = read_int(v, p);
      if (s.threads < 1) parse_fail(p, "must be at least 1");
    });
  });

  with_key(doc, "", "heatmap", [&](const Json& j, const std::string& path) {
    require_object(j, path, {"x", "y"});
    with_key(j, path, "x", [&](const Json& v, const std::string& p) { c.heatmap.x = read_axis(v, p, c.heatmap.x); });
    with_key(j, path, "y", [&](const Json& v, const std::string& p) { c.heatmap.y = read_axis(v, p, c.heatmap.y); });
    if (c.heatmap.x.param == c.heatmap.y.param) parse_fail(path, "x and y must be different parameters");
  });

  with_key(doc, "", "diagonal", [&](const Json& j, const std::string& path) {
    require_object(j, path, {"grid"});
    with_key(j, path, "grid", [&](const Json& v, const std::string& p) { c.diagonal.grid = read_grid(v, p); });
  });

  with_key(doc, "", "gmin", [&](const Json& j, const std::string& path) {
    require_object(j, path, {"g", "grid"});
    with_key(j, path, "g", [&](const Json& v, const std::string& p) { c.gmin.g = read_numbers(v, p); });
    with_key(j, path, "grid", [&](const Json& v, const std::string& p) { c.gmin.grid = read_grid(v, p); });
  });

  with_key(doc, "", "k0scan", [&](const Json& j, const std::string& path) {
    require_object(j, path, {"g1", "k", "grid"});
    with_key(j, path, "g1", [&](const Json& v, const std::string& p) { c.k0scan.g1 = read_numbers(v, p); });
    with_key(j, path, "k", [&](const Json& v, const std::string& p) { c.k0scan.k = read_axis(v, p, c.k0scan.k); });
    with_key(j, path, "grid", [&](const Json& v, const std::string& p) { c.k0scan.grid = read_grid(v, p); });
  });

  with_key(doc, "", "output", [&](const Json& j, const std::string& path) {
    require_object(j, path, {"dir", "formats"});
    with_key(j, path, "dir", [&](const Json& v, const std::string& p) { c.output.dir = read_string(v, p); });
    with_key(j, path, "formats", [&](const Json& v, const std::string& p) {
      if (!v.is_array() || v.empty()) parse_fail(p, "expected a non-empty array");
      c.output.formats.clear();
      for (std::size_t i = 0; i < v.size(); ++i) {
        const auto pi = p + "[" + std::to_string(i) + "]";
        const auto f = read_string(v[i], pi);
        if (f != "csv" && f != "json") parse_fail(pi, "expected csv or json, got '" + f + "'");
        c.output.formats.push_back(f);
      }
    });
  });

  try {
    validate(c.system.model);
  } catch (const Error& e) {
    parse_fail("model", e.what());
  }
  return c;
}

inline RunConfig parse_config(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::parse_error, std::string("malformed JSON: ") + e.what());
  }
  return parse_config_json(doc);
}

/// Applies "a.b.c=value" to a document. The value is read as JSON when it
/// parses, otherwise as a string, so `initial=ket(0,0,1)` needs no quoting.
inline void apply_override(Json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw Error(ErrorCode::parse_error, "override '" + assignment + "' is not of the form key.path=value");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  Json value;
  try {
    value = Json::parse(text);
  } catch (const Json::parse_error&) {
    value = text;
  }
  Json* node = &doc;
  std::size_t start = 0;
  for (;;) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw Error(ErrorCode::parse_error, "override key '" + key + "' has an empty component");
    if (!node->is_object()) {
      if (!node->is_null()) throw Error(ErrorCode::parse_error, "override key '" + key + "' descends into a non-object");
      *node = Json::object();
    }
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

}  // namespace darkzeno

#endif  // DARKZENO_CONFIG_HPP
