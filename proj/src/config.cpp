#include "tomedia/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace tomedia {

using nlohmann::json;

ConfigError::ConfigError(const std::string& path, int line, const std::string& message)
    : Error(path.empty() ? message
                         : (line > 0 ? path + " (line " + std::to_string(line) + "): " + message
                                     : path + ": " + message)),
      path_(path),
      line_(line) {}

namespace {

int line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
}

// Walks the object tree, remembering the dotted path and a best-effort source
// line for each key (first occurrence of the quoted key after its parent).
class Reader {
 public:
  Reader(const json& node, std::string path, const std::string& text, std::size_t from)
      : node_(node), path_(std::move(path)), text_(text), from_(from) {
    if (!node_.is_object()) fail("expected an object");
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw ConfigError(path_.empty() ? "<root>" : path_, line_of_offset(text_, from_), message);
  }

  [[noreturn]] void fail_key(const std::string& key, const std::string& message) const {
    throw ConfigError(join(key), line_of_offset(text_, locate(key)), message);
  }

  void allow(std::initializer_list<const char*> keys) const {
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& item : node_.items()) {
      if (!allowed.count(item.key())) fail_key(item.key(), "unknown key");
    }
  }

  bool has(const std::string& key) const { return node_.contains(key); }

  double number(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_number()) fail_key(key, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail_key(key, "expected a finite number");
    return d;
  }

  double positive(const std::string& key, double fallback) const {
    const double d = number(key, fallback);
    if (!(d > 0.0)) fail_key(key, "must be > 0");
    return d;
  }

  long long integer(const std::string& key, long long fallback) const {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_number_integer()) fail_key(key, "expected an integer");
    return v.get<long long>();
  }

  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_boolean()) fail_key(key, "expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback,
                     std::initializer_list<const char*> choices = {}) const {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_string()) fail_key(key, "expected a string");
    std::string s = v.get<std::string>();
    if (choices.size() > 0 &&
        std::none_of(choices.begin(), choices.end(), [&](const char* c) { return s == c; })) {
      std::string list;
      for (const char* c : choices) list += (list.empty() ? "" : ", ") + std::string(c);
      fail_key(key, "must be one of: " + list);
    }
    return s;
  }

  template <std::size_t N>
  std::array<double, N> numbers(const std::string& key, std::array<double, N> fallback) const {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_array() || v.size() != N) fail_key(key, "expected an array of " + std::to_string(N) + " numbers");
    std::array<double, N> out{};
    for (std::size_t i = 0; i < N; ++i) {
      if (!v[i].is_number() || !std::isfinite(v[i].get<double>())) {
        fail_key(key, "expected an array of " + std::to_string(N) + " numbers");
      }
      out[i] = v[i].get<double>();
    }
    return out;
  }

  std::vector<double> number_list(const std::string& key, std::vector<double> fallback) const {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_array()) fail_key(key, "expected an array of numbers");
    std::vector<double> out;
    for (const json& e : v) {
      if (!e.is_number() || !std::isfinite(e.get<double>())) fail_key(key, "expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  Reader child(const std::string& key) const {
    const json& v = node_.at(key);
    if (!v.is_object()) fail_key(key, "expected an object");
    return Reader(v, join(key), text_, locate(key));
  }

  std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  std::size_t locate(const std::string& key) const {
    const std::size_t at = text_.find("\"" + key + "\"", from_);
    return at == std::string::npos ? from_ : at;
  }

  const json& node_;
  std::string path_;
  const std::string& text_;
  std::size_t from_;
};

MapSpec read_map(const Reader& r) {
  MapSpec m;
  m.kind = r.string("kind", m.kind,
                    {"identity", "cylindrical_cloak", "lens_slab", "radial_polynomial", "composite"});
  if (m.kind == "identity") {
    r.allow({"kind"});
  } else if (m.kind == "cylindrical_cloak") {
    r.allow({"kind", "R1", "R2", "axis"});
    m.R1 = r.number("R1", m.R1);
    m.R2 = r.number("R2", m.R2);
    m.axis = r.string("axis", m.axis, {"x", "y", "z"});
  } else if (m.kind == "lens_slab") {
    r.allow({"kind", "b"});
    m.b = r.number("b", m.b);
  } else if (m.kind == "radial_polynomial") {
    r.allow({"kind", "coeffs"});
    m.coeffs = r.number_list("coeffs", m.coeffs);
  } else {
    r.allow({"kind", "first", "second"});
    if (!r.has("first") || !r.has("second")) r.fail("composite map needs `first` and `second`");
    m.parts.push_back(read_map(r.child("first")));
    m.parts.push_back(read_map(r.child("second")));
  }
  return m;
}

json write_map(const MapSpec& m) {
  json j;
  j["kind"] = m.kind;
  if (m.kind == "cylindrical_cloak") {
    j["R1"] = m.R1;
    j["R2"] = m.R2;
    j["axis"] = m.axis;
  } else if (m.kind == "lens_slab") {
    j["b"] = m.b;
  } else if (m.kind == "radial_polynomial") {
    j["coeffs"] = m.coeffs;
  } else if (m.kind == "composite") {
    j["first"] = write_map(m.parts.at(0));
    j["second"] = write_map(m.parts.at(1));
  }
  return j;
}

// Fields that only matter to other map kinds keep their defaults so that
// equality after a round trip is exact.
void canonicalize(MapSpec& m) {
  const MapSpec d;
  if (m.kind != "cylindrical_cloak") {
    m.R1 = d.R1;
    m.R2 = d.R2;
    m.axis = d.axis;
  }
  if (m.kind != "lens_slab") m.b = d.b;
  if (m.kind != "radial_polynomial") m.coeffs = d.coeffs;
  if (m.kind != "composite") m.parts.clear();
  for (MapSpec& p : m.parts) canonicalize(p);
}

std::size_t count_value(const Reader& r, const std::string& key, double v) {
  if (v < 1.0 || v != std::floor(v) || v > 1e7) r.fail_key(key, "counts must be positive integers");
  return static_cast<std::size_t>(v);
}

RunConfig read_config(const json& root, const std::string& text) {
  const Reader r(root, "", text, 0);
  r.allow({"map", "background", "units", "grid", "source", "validate", "modes", "solve",
           "output_dir", "tolerances"});
  RunConfig c;

  if (r.has("map")) {
    const Reader m = r.child("map");
    c.map = read_map(m);
    canonicalize(c.map);
    try {
      (void)build_map(c.map);
    } catch (const std::invalid_argument& e) {
      m.fail(e.what());
    }
  }

  if (r.has("background")) {
    const Reader b = r.child("background");
    b.allow({"eps", "mu"});
    c.eps = b.number("eps", c.eps);
    c.mu = b.number("mu", c.mu);
    if (c.eps == 0.0) b.fail_key("eps", "must be non-zero");
    if (c.mu == 0.0) b.fail_key("mu", "must be non-zero");
  }

  c.units = r.string("units", c.units, {"natural", "si"});

  if (r.has("grid")) {
    const Reader g = r.child("grid");
    g.allow({"min", "max", "counts", "layout"});
    c.grid.min = g.numbers<3>("min", c.grid.min);
    c.grid.max = g.numbers<3>("max", c.grid.max);
    std::array<double, 3> counts{};
    for (int a = 0; a < 3; ++a) counts[static_cast<std::size_t>(a)] = static_cast<double>(c.grid.counts[static_cast<std::size_t>(a)]);
    counts = g.numbers<3>("counts", counts);
    for (std::size_t a = 0; a < 3; ++a) c.grid.counts[a] = count_value(g, "counts", counts[a]);
    c.grid.layout = g.string("layout", c.grid.layout, {"cells", "nodes"});
    try {
      (void)build_grid(c.grid);
    } catch (const std::invalid_argument& e) {
      g.fail(e.what());
    }
  }

  if (r.has("source")) {
    const Reader s = r.child("source");
    s.allow({"position", "wavelength"});
    c.source.position = s.numbers<3>("position", c.source.position);
    c.source.wavelength = s.positive("wavelength", c.source.wavelength);
  }

  if (r.has("validate")) {
    const Reader v = r.child("validate");
    v.allow({"k", "polarization", "residual_tol", "interface_cells"});
    c.validate.k = v.numbers<3>("k", c.validate.k);
    c.validate.polarization = v.numbers<3>("polarization", c.validate.polarization);
    c.validate.residual_tol = v.positive("residual_tol", c.validate.residual_tol);
    c.validate.interface_cells = v.number("interface_cells", c.validate.interface_cells);
    if (c.validate.interface_cells < 0.0) v.fail_key("interface_cells", "must be >= 0");
    const Vec3 k(c.validate.k.data());
    const Vec3 p(c.validate.polarization.data());
    if (k.norm() == 0.0) v.fail_key("k", "must be non-zero");
    if (p.norm() == 0.0 || std::abs(p.dot(k)) > 1e-12 * p.norm() * k.norm()) {
      v.fail_key("polarization", "must be non-zero and transverse to k");
    }
  }

  if (r.has("modes")) {
    const Reader m = r.child("modes");
    m.allow({"box_length", "points", "count", "seed"});
    c.modes.box_length = m.positive("box_length", c.modes.box_length);
    const long long pts = m.integer("points", static_cast<long long>(c.modes.points));
    if (pts < 4 || pts > 256) m.fail_key("points", "must lie in [4, 256]");
    c.modes.points = static_cast<std::size_t>(pts);
    const long long count = m.integer("count", c.modes.count);
    if (count < 1 || count > 64) m.fail_key("count", "must lie in [1, 64]");
    c.modes.count = static_cast<int>(count);
    const long long seed = m.integer("seed", static_cast<long long>(c.modes.seed));
    if (seed < 0) m.fail_key("seed", "must be >= 0");
    c.modes.seed = static_cast<std::uint64_t>(seed);
  }

  if (r.has("solve")) {
    const Reader s = r.child("solve");
    s.allow({"wavelength", "cells_per_wavelength", "half_width", "pml_cells", "pml_reflection",
             "pml_order", "tfsf_half_width", "direction", "solver", "interior_eps", "mask_cells",
             "subcell_samples", "control"});
    SolveSpec& o = c.solve;
    o.wavelength = s.positive("wavelength", o.wavelength);
    o.cells_per_wavelength = s.positive("cells_per_wavelength", o.cells_per_wavelength);
    if (o.cells_per_wavelength < 4.0) s.fail_key("cells_per_wavelength", "must be >= 4");
    o.half_width = s.positive("half_width", o.half_width);
    const long long pml = s.integer("pml_cells", o.pml_cells);
    if (pml < 8 || pml > 200) s.fail_key("pml_cells", "must lie in [8, 200]");
    o.pml_cells = static_cast<int>(pml);
    o.pml_reflection = s.positive("pml_reflection", o.pml_reflection);
    if (o.pml_reflection >= 1.0) s.fail_key("pml_reflection", "must lie in (0, 1)");
    const long long order = s.integer("pml_order", o.pml_order);
    if (order < 0 || order > 6) s.fail_key("pml_order", "must lie in [0, 6]");
    o.pml_order = static_cast<int>(order);
    o.tfsf_half_width = s.positive("tfsf_half_width", o.tfsf_half_width);
    if (o.tfsf_half_width >= o.half_width) s.fail_key("tfsf_half_width", "must be smaller than half_width");
    o.direction = s.numbers<2>("direction", o.direction);
    if (std::hypot(o.direction[0], o.direction[1]) == 0.0) s.fail_key("direction", "must be non-zero");
    o.solver = s.string("solver", o.solver, {"auto", "krylov", "direct"});
    o.interior_eps = s.number("interior_eps", o.interior_eps);
    o.mask_cells = s.number("mask_cells", o.mask_cells);
    if (o.mask_cells < 0.0) s.fail_key("mask_cells", "must be >= 0");
    const long long sub = s.integer("subcell_samples", o.subcell_samples);
    if (sub < 1 || sub > 32) s.fail_key("subcell_samples", "must lie in [1, 32]");
    o.subcell_samples = static_cast<int>(sub);
    if (s.has("control")) {
      const Reader k = s.child("control");
      k.allow({"enabled", "radius", "eps"});
      o.control.enabled = k.boolean("enabled", o.control.enabled);
      o.control.radius = k.positive("radius", o.control.radius);
      o.control.eps = k.number("eps", o.control.eps);
    }
  }

  c.output_dir = r.string("output_dir", c.output_dir);
  if (c.output_dir.empty()) r.fail_key("output_dir", "must not be empty");

  if (r.has("tolerances")) {
    const Reader t = r.child("tolerances");
    t.allow({"quad_tol", "gram_tol", "solver_tol"});
    c.tolerances.quad_tol = t.positive("quad_tol", c.tolerances.quad_tol);
    c.tolerances.gram_tol = t.positive("gram_tol", c.tolerances.gram_tol);
    c.tolerances.solver_tol = t.positive("solver_tol", c.tolerances.solver_tol);
  }
  return c;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0),
                      std::string("invalid JSON: ") + e.what());
  }
  return read_config(root, text);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path, 0, "cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize(const RunConfig& c) {
  json j;
  j["map"] = write_map(c.map);
  j["background"] = {{"eps", c.eps}, {"mu", c.mu}};
  j["units"] = c.units;
  j["grid"] = {{"min", c.grid.min}, {"max", c.grid.max}, {"counts", c.grid.counts},
               {"layout", c.grid.layout}};
  j["source"] = {{"position", c.source.position}, {"wavelength", c.source.wavelength}};
  j["validate"] = {{"k", c.validate.k},
                   {"polarization", c.validate.polarization},
                   {"residual_tol", c.validate.residual_tol},
                   {"interface_cells", c.validate.interface_cells}};
  j["modes"] = {{"box_length", c.modes.box_length},
                {"points", c.modes.points},
                {"count", c.modes.count},
                {"seed", c.modes.seed}};
  const SolveSpec& s = c.solve;
  j["solve"] = {{"wavelength", s.wavelength},
                {"cells_per_wavelength", s.cells_per_wavelength},
                {"half_width", s.half_width},
                {"pml_cells", s.pml_cells},
                {"pml_reflection", s.pml_reflection},
                {"pml_order", s.pml_order},
                {"tfsf_half_width", s.tfsf_half_width},
                {"direction", s.direction},
                {"solver", s.solver},
                {"interior_eps", s.interior_eps},
                {"mask_cells", s.mask_cells},
                {"subcell_samples", s.subcell_samples},
                {"control", {{"enabled", s.control.enabled}, {"radius", s.control.radius}, {"eps", s.control.eps}}}};
  j["output_dir"] = c.output_dir;
  j["tolerances"] = {{"quad_tol", c.tolerances.quad_tol},
                     {"gram_tol", c.tolerances.gram_tol},
                     {"solver_tol", c.tolerances.solver_tol}};
  return j.dump(2) + "\n";
}

CoordinateMap build_map(const MapSpec& spec) {
  if (spec.kind == "identity") return CoordinateMap::identity();
  if (spec.kind == "cylindrical_cloak") {
    const Axis axis = spec.axis == "x" ? Axis::X : spec.axis == "y" ? Axis::Y : Axis::Z;
    return CoordinateMap::cylindrical_cloak(spec.R1, spec.R2, axis);
  }
  if (spec.kind == "lens_slab") return CoordinateMap::lens_slab(spec.b);
  if (spec.kind == "radial_polynomial") return CoordinateMap::radial_polynomial(spec.coeffs);
  if (spec.kind == "composite") {
    if (spec.parts.size() != 2) throw std::invalid_argument("composite map needs two parts");
    return CoordinateMap::compose(build_map(spec.parts[0]), build_map(spec.parts[1]));
  }
  throw std::invalid_argument("unknown map kind: " + spec.kind);
}

Grid build_grid(const GridSpec& spec) {
  const Point3 lo(spec.min[0], spec.min[1], spec.min[2]);
  const Point3 hi(spec.max[0], spec.max[1], spec.max[2]);
  return spec.layout == "nodes" ? Grid::from_bounds(lo, hi, spec.counts)
                                : Grid::cell_centred(lo, hi, spec.counts);
}

PhysicalConstants build_constants(const RunConfig& config) {
  return config.units == "si" ? PhysicalConstants::si() : PhysicalConstants::natural();
}

}  // namespace tomedia
