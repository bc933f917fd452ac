#pragma once

// Run configuration for the command-line tool. JSON text with a fixed schema;
// every key is optional and falls back to the defaults below, unknown keys are
// rejected. Parsing validates the whole configuration before anything runs.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "tomedia/coordmaps.hpp"
#include "tomedia/errors.hpp"
#include "tomedia/fields.hpp"
#include "tomedia/grid.hpp"

namespace tomedia {

// Raised for malformed or invalid configuration. `path` is the dotted key
// path (e.g. "map.R1"), `line` the 1-based line in the source text or 0 when
// unknown.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& path, int line, const std::string& message);
  const std::string& path() const { return path_; }
  int line() const { return line_; }

 private:
  std::string path_;
  int line_;
};

struct MapSpec {
  std::string kind = "identity";  // identity | cylindrical_cloak | lens_slab | radial_polynomial | composite
  double R1 = 0.5;
  double R2 = 1.0;
  std::string axis = "z";
  double b = 1.0;
  std::vector<double> coeffs{1.0};
  std::vector<MapSpec> parts;  // composite: first, second

  bool operator==(const MapSpec&) const = default;
};

struct GridSpec {
  std::array<double, 3> min{-2.0, -2.0, 0.0};
  std::array<double, 3> max{2.0, 2.0, 0.0};
  std::array<std::size_t, 3> counts{128, 128, 1};
  std::string layout = "cells";  // cells | nodes

  bool operator==(const GridSpec&) const = default;
};

// Point source for the `wave` renders, given in physical space.
struct SourceSpec {
  std::array<double, 3> position{-1.5, 0.0, 0.0};
  double wavelength = 0.5;

  bool operator==(const SourceSpec&) const = default;
};

struct ValidateSpec {
  std::array<double, 3> k{6.283185307179586, 0.0, 0.0};
  std::array<double, 3> polarization{0.0, 0.7071067811865476, 0.7071067811865476};
  double residual_tol = 2e-2;
  double interface_cells = 2.5;  // points this many cells from a kink are skipped

  bool operator==(const ValidateSpec&) const = default;
};

struct ModesSpec {
  double box_length = 1.0;
  std::size_t points = 8;  // per axis
  int count = 8;
  std::uint64_t seed = 1;

  bool operator==(const ModesSpec&) const = default;
};

struct ControlSpec {
  bool enabled = false;
  double radius = 0.5;
  double eps = 10.0;

  bool operator==(const ControlSpec&) const = default;
};

struct SolveSpec {
  double wavelength = 1.0;
  double cells_per_wavelength = 40.0;
  double half_width = 1.75;
  int pml_cells = 12;
  double pml_reflection = 1e-6;
  int pml_order = 2;
  double tfsf_half_width = 1.4;
  std::array<double, 2> direction{1.0, 0.0};
  std::string solver = "auto";  // auto | krylov | direct
  double interior_eps = 1.0;
  double mask_cells = 2.0;
  int subcell_samples = 4;
  ControlSpec control;

  bool operator==(const SolveSpec&) const = default;
};

struct Tolerances {
  double quad_tol = 1e-8;
  double gram_tol = 1e-8;
  double solver_tol = 1e-8;

  bool operator==(const Tolerances&) const = default;
};

struct RunConfig {
  MapSpec map;
  double eps = 1.0;  // background eps'
  double mu = 1.0;   // background mu'
  std::string units = "natural";  // natural | si
  GridSpec grid;
  SourceSpec source;
  ValidateSpec validate;
  ModesSpec modes;
  SolveSpec solve;
  std::string output_dir = "out";
  Tolerances tolerances;

  bool operator==(const RunConfig&) const = default;
};

// Throws ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Canonical JSON text; parse_config(serialize(c)) == c.
std::string serialize(const RunConfig& config);

CoordinateMap build_map(const MapSpec& spec);
Grid build_grid(const GridSpec& spec);
PhysicalConstants build_constants(const RunConfig& config);

}  // namespace tomedia
