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

#include <catch_amalgamated.hpp>

#include <string>

#include "darkzeno/config.hpp"

using namespace darkzeno;

namespace {

std::string parse_error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::parse_error);
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("presets carry the documented parameters", "[config]") {
  const auto fig1 = parse_config(R"j({"preset": "fig1"})j").system.model;
  CHECK(fig1.omega == 1000.0);
  CHECK(fig1.g1 == 30.0);
  CHECK(fig1.g2 == 50.0);
  CHECK(fig1.gamma_out == 20.0);
  CHECK(fig1.gamma_in == 10.0);
  CHECK(fig1.gamma_deph1 == 20.0);
  CHECK(fig1.gamma_deph2 == 20.0);

  const auto fig4 = parse_config(R"j({"preset": "fig4"})j");
  CHECK(fig4.system.model.g1 == 2.0);
  CHECK(fig4.system.model.g2 == 2.0);
  CHECK(fig4.system.model.gamma_out == 10.0);
  CHECK(fig4.system.model.gamma_in == 3.0);
  CHECK(thermal_parameter(fig4.system.model.gamma_in, fig4.system.model.gamma_out) == Catch::Approx(0.3));
  CHECK(fig4.diagonal.grid.values().size() == 81);

  const auto fig7 = preset("fig7");
  CHECK(fig7.system.model.g2 == 70.0);
  CHECK(fig7.system.model.gamma_in == 8.0);
  CHECK(fig7.system.initial == InitialState::basis(0, 0, 1));

  const auto fig3 = preset("fig3");
  CHECK(fig3.system.model.g1 == fig3.system.model.g2);
  CHECK(fig3.heatmap.x.max == 200.0);
  CHECK(preset("fig3_low").heatmap.y.max == 0.2);

  CHECK(preset("fig2a").system.channels == ChannelToggles::dephasing_only());
  CHECK(preset("fig2b").system.channels == ChannelToggles::outflow_and_dephasing());
  CHECK(preset("fig2c").system.channels == ChannelToggles::all());
  CHECK(preset("fig8").heatmap.x.param == AxisParam::mu);
  CHECK(preset("fig9").system.model.g2 == 54.0);
  CHECK(preset("fig10").system.channels == ChannelToggles::dephasing_only());

  for (const auto& name : preset_names()) {
    const auto c = preset(name);
    CHECK(c.system.n_max == 1);
    CHECK(c.system.max_excitations == 1);
  }
}

TEST_CASE("serialize then parse is the identity", "[config]") {
  for (const auto& name : preset_names()) {
    const RunConfig c = preset(name);
    CHECK(parse_config(serialize(c)) == c);
  }
  RunConfig custom = preset("fig1");
  custom.preset.reset();
  custom.system.initial = InitialState::explicit_amplitudes({Complex(0.6, 0.0), Complex(0.0, 0.8), 0.0, 0.0});
  custom.integrator.dt = 2.5e-7;
  custom.integrator.sanitize = true;
  custom.integrator.method = Method::euler_split;
  custom.system.max_excitations.reset();
  custom.gmin.grid = SegmentedGrid{{{0.0, 1.0, 3}, {1.0, 4.0, 4}}};
  custom.output.formats = {"json"};
  CHECK(parse_config(serialize(custom)) == custom);
  CHECK(serialize(parse_config(serialize(custom))) == serialize(custom));
}

TEST_CASE("keys next to a preset override it", "[config]") {
  const auto c = parse_config(R"j({"preset": "fig4", "model": {"g1": 3}, "heatmap": {"x": {"points": 5}}})j");
  CHECK(c.system.model.g1 == 3.0);
  CHECK(c.system.model.g2 == 2.0);
  CHECK(c.heatmap.x.points == 5);
  CHECK(c.heatmap.x.max == 200.0);
}

TEST_CASE("parse errors name the key path", "[config]") {
  CHECK_THAT(parse_error_of(R"j({"preset": "fig1", "model": {"g3": 1}})j"), Catch::Matchers::ContainsSubstring("model.g3"));
  CHECK_THAT(parse_error_of(R"j({"preset": "fig1", "colour": 1})j"), Catch::Matchers::ContainsSubstring("colour"));
  CHECK_THAT(parse_error_of(R"j({"initial": "dark(0)"})j"), Catch::Matchers::ContainsSubstring("model"));
  CHECK_THAT(parse_error_of(R"j({"model": {}})j"), Catch::Matchers::ContainsSubstring("initial"));
  CHECK_THAT(parse_error_of(R"j({"preset": "fig1", "model": {"gamma_out": -1}})j"),
             Catch::Matchers::ContainsSubstring("model.gamma_out"));
  CHECK_THAT(parse_error_of(R"j({"preset": "fig1", "model": {"g1": "thirty"}})j"),
             Catch::Matchers::ContainsSubstring("model.g1"));
  CHECK_THAT(parse_error_of(R"j({"preset": "fig99"})j"), Catch::Matchers::ContainsSubstring("fig99"));
  CHECK_THAT(parse_error_of(R"j({"preset": "fig1", "diagonal": {"grid": [{"min": 0, "max": 1, "points": 1}]}})j"),
             Catch::Matchers::ContainsSubstring("diagonal.grid[0].points"));
  CHECK_THAT(parse_error_of(R"j({"preset": "fig1", "heatmap": {"y": {"param": "gamma_deph1"}}})j"),
             Catch::Matchers::ContainsSubstring("heatmap"));
  CHECK_THAT(parse_error_of(R"j({"preset": "fig1", "integrator": {"method": "rk45"}})j"),
             Catch::Matchers::ContainsSubstring("integrator.method"));
  CHECK_THAT(parse_error_of(R"j({"preset": "fig1", "output": {"formats": ["xml"]}})j"),
             Catch::Matchers::ContainsSubstring("output.formats[0]"));
  CHECK_THAT(parse_error_of("{\"preset\": "), Catch::Matchers::ContainsSubstring("malformed"));
}

TEST_CASE("initial-state strings", "[config]") {
  CHECK(parse_initial("dark(0)") == InitialState::dark(0));
  CHECK(parse_initial(" dark( 2 ) ") == InitialState::dark(2));
  CHECK(parse_initial("ket(0,0,1)") == InitialState::basis(0, 0, 1));
  CHECK(parse_initial("ket(3, 1, 0)") == InitialState::basis(3, 1, 0));
  CHECK_THROWS_AS(parse_initial("ket(0,2,1)"), Error);
  CHECK_THROWS_AS(parse_initial("bright(0)"), Error);

  const auto c = parse_config(R"j({"preset": "fig1", "initial": {"explicit": [[0.6, 0], [0, 0.8], 0, 0]}})j");
  REQUIRE(c.system.initial.kind == InitialState::Kind::amplitudes);
  CHECK(c.system.initial.amplitudes[1] == Complex(0.0, 0.8));
  CHECK(c.system.initial.vector(c.system.space(), c.system.model).norm() == Catch::Approx(1.0));
}

TEST_CASE("overrides set nested keys", "[config]") {
  Json doc = {{"preset", "fig1"}};
  apply_override(doc, "model.g1=40");
  apply_override(doc, "initial=ket(0,1,0)");
  apply_override(doc, "integrator.method=euler_split");
  apply_override(doc, "integrator.dt=1e-6");
  apply_override(doc, "gmin.g=[1,2]");
  const auto c = parse_config_json(doc);
  CHECK(c.system.model.g1 == 40.0);
  CHECK(c.system.initial == InitialState::basis(0, 1, 0));
  CHECK(c.integrator.method == Method::euler_split);
  CHECK(c.integrator.dt == 1e-6);
  CHECK(c.gmin.g == std::vector<double>{1.0, 2.0});

  CHECK_THROWS_AS(apply_override(doc, "no_equals_sign"), Error);
  CHECK_THROWS_AS(apply_override(doc, "model..g1=1"), Error);
  CHECK_THROWS_AS(apply_override(doc, "model.g1.x=1"), Error);
}
