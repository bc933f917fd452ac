#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <string>

#include "test_util.hpp"
#include "tomedia/config.hpp"

using namespace tomedia;

namespace {

// Parses `text`, expecting a ConfigError, and returns it.
ConfigError config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e;
  }
  FAIL("expected ConfigError for: " << text);
  return ConfigError("", 0, "");
}

}  // namespace

TEST_CASE("shipped configs round-trip through serialize") {
  for (const auto& entry : std::filesystem::directory_iterator(testutil::source_path("configs"))) {
    if (entry.path().extension() != ".json") continue;
    CAPTURE(entry.path().string());
    const RunConfig c = load_config(entry.path().string());
    const RunConfig back = parse_config(serialize(c));
    CHECK(back == c);
    CHECK(serialize(back) == serialize(c));
  }
}

TEST_CASE("empty object gives the defaults") {
  const RunConfig c = parse_config("{}");
  CHECK(c == RunConfig{});
  CHECK(c.map.kind == "identity");
  CHECK(c.units == "natural");
  CHECK(c.output_dir == "out");
}

TEST_CASE("shipped cloak config") {
  const RunConfig c = load_config(testutil::source_path("configs/cloak.json"));
  CHECK(c.map.kind == "cylindrical_cloak");
  CHECK(c.map.R1 == 0.5);
  CHECK(c.map.R2 == 1.0);
  CHECK(c.grid.counts[0] == 256);
  CHECK(c.grid.counts[2] == 1);
  CHECK(c.output_dir == "out/cloak");
}

TEST_CASE("composite maps parse and build") {
  const RunConfig c = parse_config(R"({"map": {"kind": "composite",
      "first": {"kind": "lens_slab", "b": 1.0},
      "second": {"kind": "cylindrical_cloak", "R1": 0.2, "R2": 0.4}}})");
  REQUIRE(c.map.parts.size() == 2);
  CHECK(c.map.parts[0].kind == "lens_slab");
  CHECK(c.map.parts[1].R2 == 0.4);
  CHECK(parse_config(serialize(c)) == c);
  CHECK_NOTHROW(build_map(c.map));

  const ConfigError e = config_error(R"({"map": {"kind": "composite", "first": {"kind": "identity"}}})");
  CHECK(e.path() == "map");
}

TEST_CASE("unknown keys report the dotted path and line") {
  const std::string text = "{\n  \"map\": {\n    \"kind\": \"cylindrical_cloak\",\n    \"R3\": 2.0\n  }\n}\n";
  const ConfigError e = config_error(text);
  CHECK(e.path() == "map.R3");
  CHECK(e.line() == 4);
  CHECK(std::string(e.what()).find("unknown key") != std::string::npos);

  const ConfigError top = config_error("{\n\"colour\": 1\n}");
  CHECK(top.path() == "colour");
  CHECK(top.line() == 2);

  const ConfigError nested = config_error(R"({"solve": {"control": {"enabled": true, "size": 2}}})");
  CHECK(nested.path() == "solve.control.size");
}

TEST_CASE("type and range errors") {
  CHECK(config_error(R"({"map": {"kind": "lens_slab", "b": "one"}})").path() == "map.b");
  CHECK(config_error(R"({"map": {"kind": "wormhole"}})").path() == "map.kind");
  CHECK(config_error(R"({"map": {"kind": "cylindrical_cloak", "R1": 1.0, "R2": 0.5}})").path() == "map");
  CHECK(config_error(R"({"background": {"eps": 0}})").path() == "background.eps");
  CHECK(config_error(R"({"units": "cgs"})").path() == "units");
  CHECK(config_error(R"({"grid": {"counts": [10, 10]}})").path() == "grid.counts");
  CHECK(config_error(R"({"grid": {"counts": [10, 0, 1]}})").path() == "grid.counts");
  CHECK(config_error(R"({"grid": {"counts": [10.5, 10, 1]}})").path() == "grid.counts");
  CHECK(config_error(R"({"source": {"wavelength": -1}})").path() == "source.wavelength");
  CHECK(config_error(R"({"validate": {"polarization": [1, 0, 0]}})").path() == "validate.polarization");
  CHECK(config_error(R"({"modes": {"points": 2}})").path() == "modes.points");
  CHECK(config_error(R"({"modes": {"count": 1.5}})").path() == "modes.count");
  CHECK(config_error(R"({"solve": {"pml_cells": 4}})").path() == "solve.pml_cells");
  CHECK(config_error(R"({"solve": {"solver": "gmres"}})").path() == "solve.solver");
  CHECK(config_error(R"({"solve": {"tfsf_half_width": 2.0}})").path() == "solve.tfsf_half_width");
  CHECK(config_error(R"({"solve": {"control": {"enabled": 1}}})").path() == "solve.control.enabled");
  CHECK(config_error(R"({"tolerances": {"gram_tol": 0}})").path() == "tolerances.gram_tol");
  CHECK(config_error(R"({"output_dir": ""})").path() == "output_dir");
  CHECK(config_error(R"({"map": 3})").path() == "map");
  CHECK(config_error("[1, 2]").path() == "<root>");
}

TEST_CASE("malformed JSON and missing files") {
  const ConfigError e = config_error("{\n  \"units\": \"natural\",\n  \"grid\": {\n}");
  CHECK(e.path() == "<root>");
  CHECK(e.line() >= 3);
  CHECK(std::string(e.what()).find("invalid JSON") != std::string::npos);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("build_grid follows the layout") {
  GridSpec s;
  s.min = {0.0, 0.0, 0.0};
  s.max = {1.0, 2.0, 0.0};
  s.counts = {4, 8, 1};
  const Grid cells = build_grid(s);
  CHECK(cells.h(0) == doctest::Approx(0.25));
  CHECK(cells.point(0).x() == doctest::Approx(0.125));
  s.layout = "nodes";
  const Grid nodes = build_grid(s);
  CHECK(nodes.point(0).x() == doctest::Approx(0.0));
  CHECK(nodes.h(0) == doctest::Approx(1.0 / 3.0));
  CHECK(nodes.count(1) == 8);
}

TEST_CASE("build_map and build_constants") {
  MapSpec cloak;
  cloak.kind = "cylindrical_cloak";
  const auto m = build_map(cloak);
  CHECK(map_point(m, Point3(0.75, 0.0, 0.0))->x() == doctest::Approx(0.5));
  MapSpec lens;
  lens.kind = "lens_slab";
  CHECK(map_point(build_map(lens), Point3(0.5, 0.0, 0.0))->x() == doctest::Approx(-0.5));

  RunConfig c;
  CHECK(build_constants(c).hbar == 1.0);
  c.units = "si";
  CHECK(build_constants(c).hbar == doctest::Approx(1.054571817e-34));
}
