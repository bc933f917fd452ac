#include "tomedia/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "tomedia/covariant.hpp"
#include "tomedia/io.hpp"
#include "tomedia/render.hpp"

namespace tomedia {

namespace {

constexpr double kPi = std::numbers::pi;

double max_spacing(const Grid& g) {
  double h = 0.0;
  for (int a = 0; a < 3; ++a) {
    if (g.active(a)) h = std::max(h, g.h(a));
  }
  return h;
}

Point3 to_point(const std::array<double, 3>& a) { return Point3(a[0], a[1], a[2]); }

// Worst value of each named check across many points.
class CheckAccumulator {
 public:
  void add(const ValidationCheck& c) {
    for (ValidationCheck& have : checks_) {
      if (have.name == c.name) {
        have.pass = have.pass && c.pass;
        have.measured = std::max(have.measured, c.measured);
        have.tolerance = c.tolerance;
        return;
      }
    }
    checks_.push_back(c);
  }
  const std::vector<ValidationCheck>& checks() const { return checks_; }

 private:
  std::vector<ValidationCheck> checks_;
};

// Deterministic coefficients in the unit square, independent of the
// standard library's distribution implementations.
std::vector<complex> draw_coefficients(std::uint64_t seed, std::size_t n) {
  std::mt19937_64 rng(seed);
  auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0; };
  std::vector<complex> out(n);
  for (complex& c : out) {
    const double re = unit();
    c = complex(re, unit());
  }
  return out;
}

std::vector<Mode> build_box_modes(const RunConfig& config, const PhysicalConstants& constants) {
  const ModesSpec& spec = config.modes;
  const double L = spec.box_length;
  const Grid grid = Grid::cell_centred(Point3::Zero(), Point3(L, L, L),
                                       {spec.points, spec.points, spec.points});
  std::vector<std::array<int, 3>> ns;
  for (int i = -2; i <= 2; ++i) {
    for (int j = -2; j <= 2; ++j) {
      for (int k = -2; k <= 2; ++k) {
        if (i != 0 || j != 0 || k != 0) ns.push_back({i, j, k});
      }
    }
  }
  std::stable_sort(ns.begin(), ns.end(), [](const auto& a, const auto& b) {
    return a[0] * a[0] + a[1] * a[1] + a[2] * a[2] < b[0] * b[0] + b[1] * b[1] + b[2] * b[2];
  });
  std::vector<Mode> modes;
  for (const auto& n : ns) {
    for (int pol = 0; pol < 2; ++pol) {
      if (static_cast<int>(modes.size()) == spec.count) return modes;
      modes.push_back(box_mode(grid, n, pol, config.eps, config.mu, constants,
                               static_cast<int>(modes.size())));
    }
  }
  return modes;
}

std::string report_line(const ValidationCheck& c) {
  return fmt::format("{:<28} {:<4} measured={} tolerance={}", c.name, c.pass ? "pass" : "FAIL",
                     format_double(c.measured), format_double(c.tolerance));
}

std::filesystem::path output_dir(const RunConfig& config, const std::string& flag) {
  std::string dir = config.output_dir;
  if (const char* env = std::getenv("TOMEDIA_OUT_DIR"); env != nullptr && *env != '\0') dir = env;
  if (!flag.empty()) dir = flag;
  return std::filesystem::path(dir);
}

int cmd_tensor(const RunConfig& config, const std::filesystem::path& dir, std::ostream& out) {
  const CoordinateMap map = build_map(config.map);
  const Grid grid = build_grid(config.grid);
  std::ostringstream csv;
  write_tensor_csv(csv, map, grid, config.eps, config.mu);
  const std::string path = (dir / "tensors.csv").string();
  write_file(path, csv.str());
  out << "wrote " << path << " (" << grid.size() << " points)\n";
  return 0;
}

int cmd_wave(const RunConfig& config, const std::filesystem::path& dir, std::ostream& out) {
  const WaveRun wave = run_wave(config);
  const std::string primed = (dir / "wave_primed.pgm").string();
  const std::string physical = (dir / "wave_physical.pgm").string();
  render_raster(wave.primed, Palette::Grayscale, primed);
  render_raster(wave.physical, Palette::Grayscale, physical);
  out << "wrote " << primed << "\nwrote " << physical << "\n";
  return 0;
}

int cmd_validate(const RunConfig& config, const std::filesystem::path& dir, std::ostream& out) {
  const ValidationReport report = run_validate(config);
  std::string text;
  for (const ValidationCheck& c : report.checks) text += report_line(c) + "\n";
  const auto failures = report.failures();
  text += failures.empty() ? "result: pass\n" : "result: FAIL\n";
  for (const std::string& f : failures) text += "failed: " + f + "\n";
  write_file((dir / "validate_report.txt").string(), text);
  out << text;
  return failures.empty() ? 0 : 1;
}

int cmd_modes(const RunConfig& config, const std::filesystem::path& dir, std::ostream& out) {
  const ModesRun run = run_modes(config);
  const auto n = run.gram.G.rows();

  std::string gram = "j,k,re_g,im_g,re_gstar,im_gstar\n";
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k < n; ++k) {
      gram += fmt::format("{},{},{},{},{},{}\n", j, k, format_double(run.gram.G(j, k).real()),
                          format_double(run.gram.G(j, k).imag()), format_double(run.gram.Gstar(j, k).real()),
                          format_double(run.gram.Gstar(j, k).imag()));
    }
  }
  std::string coeffs = "index,label,omega,re_in,im_in,re_out,im_out\n";
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    coeffs += fmt::format("{},{},{},{},{},{},{}\n", k, run.labels[uk], format_double(run.omegas[uk]),
                          format_double(run.injected[k].real()), format_double(run.injected[k].imag()),
                          format_double(run.recovered[k].real()), format_double(run.recovered[k].imag()));
  }

  const Tolerances& tol = config.tolerances;
  const double coeffErr = (run.recovered - run.injected).cwiseAbs().maxCoeff();
  const double energyErr = std::abs(run.energy - run.oscillatorEnergy) / run.oscillatorEnergy;
  std::vector<ValidationCheck> checks = {
      {"gram_offdiag", run.gram.maxOffDiag <= tol.gram_tol, run.gram.maxOffDiag, tol.gram_tol},
      {"gram_diag", run.gram.maxDiagErr <= tol.gram_tol, run.gram.maxDiagErr, tol.gram_tol},
      {"gram_star", run.gram.maxGstar <= tol.gram_tol, run.gram.maxGstar, tol.gram_tol},
      {"coefficient_recovery", coeffErr <= tol.quad_tol, coeffErr, tol.quad_tol},
      {"reconstruction", run.reconstructionResidual <= tol.quad_tol, run.reconstructionResidual, tol.quad_tol},
      {"product_drift", run.drift <= tol.quad_tol, run.drift, tol.quad_tol},
      {"energy_vs_oscillators", energyErr <= tol.quad_tol, energyErr, tol.quad_tol},
  };
  std::string report;
  bool ok = true;
  for (const ValidationCheck& c : checks) {
    report += report_line(c) + "\n";
    ok = ok && c.pass;
  }
  report += "zero_point_energy " + format_double(run.zeroPoint) + "\n";
  report += ok ? "result: pass\n" : "result: FAIL\n";

  write_file((dir / "modes_gram.csv").string(), gram);
  write_file((dir / "modes_coefficients.csv").string(), coeffs);
  write_file((dir / "modes_report.txt").string(), report);
  out << report;
  return ok ? 0 : 1;
}

int cmd_solve(const RunConfig& config, const std::filesystem::path& dir, std::ostream& out) {
  const SolveRun run = run_solve(config);
  const ComplexScalarField total = fdfd::total_field(run.problem, run.solution);
  render_raster(total, Palette::Grayscale, (dir / "solve_ez.pgm").string());

  nlohmann::ordered_json report;
  report["external_scatter_norm"] = run.metrics.externalScatterNorm;
  report["interior_leak_norm"] = run.metrics.interiorLeakNorm;
  report["mapped_field_error"] = run.metrics.mappedFieldError;
  report["iterations"] = run.solution.iterations;
  report["relative_residual"] = run.solution.relativeResidual;
  report["method"] = to_string(run.solution.method);
  report["unknowns"] = run.problem.grid.size();
  const std::string text = report.dump(2) + "\n";
  write_file((dir / "solve_report.txt").string(), text);
  out << text;
  return run.solution.relativeResidual <= 10.0 * config.tolerances.solver_tol ? 0 : 1;
}

void apply_grid_override(RunConfig& config, const std::string& command, int n) {
  if (n < 2) throw ConfigError("--grid", 0, "must be >= 2");
  if (command == "solve") {
    if (n < 4) throw ConfigError("--grid", 0, "cells per wavelength must be >= 4");
    config.solve.cells_per_wavelength = n;
  } else if (command == "modes") {
    if (n < 4 || n > 256) throw ConfigError("--grid", 0, "must lie in [4, 256]");
    config.modes.points = static_cast<std::size_t>(n);
  } else {
    for (std::size_t& c : config.grid.counts) {
      if (c > 1) c = static_cast<std::size_t>(n);
    }
  }
}

}  // namespace

WaveRun run_wave(const RunConfig& config) {
  const CoordinateMap map = build_map(config.map);
  const Grid grid = build_grid(config.grid);
  if (grid.count(2) != 1) throw ConfigError("grid.counts", 0, "wave renders need a single z layer");
  const PhysicalConstants constants = build_constants(config);
  const Point3 source = to_point(config.source.position);
  const auto primedSource = map_point(map, source);
  if (!primedSource) throw ConfigError("source.position", 0, "source has no image under the map");
  const double k = 2.0 * kPi / config.source.wavelength;

  WaveRun run;
  run.primed = spherical_wave_scalar(*primedSource, k, grid, constants);
  const SphericalWave wave{*primedSource, k};
  run.physical = transform_scalar([&](const Point3& p) { return wave.at(p); }, run.primed.omega, map,
                                  grid, Direction::ToPhysical, *primedSource, max_spacing(grid));
  return run;
}

ValidationReport run_validate(const RunConfig& config) {
  const CoordinateMap map = build_map(config.map);
  const Grid grid = build_grid(config.grid);
  const PhysicalConstants constants = build_constants(config);
  const double h = max_spacing(grid);
  CheckAccumulator acc;

  std::size_t points = 0;
  double routeGap = 0.0;
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    const Point3 p = grid.point(idx);
    if (interface_distance(map, p) < config.validate.interface_cells * h) continue;
    JacobianData jac;
    try {
      jac = jacobian(map, p);
    } catch (const UndefinedImage&) {
      continue;
    }
    const MaterialTensors t = material_tensors(jac, config.eps, config.mu);
    for (const ValidationCheck& c : validate_tensors(t, jac).checks) acc.add(c);
    const MaterialTensors m = material_tensors_metric(jac, config.eps, config.mu);
    const double scale = std::max({1.0, t.eps.cwiseAbs().maxCoeff(), t.mu.cwiseAbs().maxCoeff()});
    routeGap = std::max(routeGap, std::max((t.eps - m.eps).cwiseAbs().maxCoeff(),
                                           (t.mu - m.mu).cwiseAbs().maxCoeff()) / scale);
    ++points;
  }
  acc.add({"tensor_routes_agree", routeGap <= 1e-12, routeGap, 1e-12});
  acc.add({"tensor_points", points > 0, static_cast<double>(points), 1.0});

  const std::vector<Mode> modes = build_box_modes(config, constants);
  const MediumField boxMedium = MediumField::uniform(modes.front().A.grid, config.eps, config.mu);
  const GramReport gram = gram_matrix(modes, boxMedium, constants);
  const double gramErr = std::max({gram.maxOffDiag, gram.maxDiagErr, gram.maxGstar});
  acc.add({"gram_orthonormal", gram.orthonormal(config.tolerances.gram_tol), gramErr,
           config.tolerances.gram_tol});

  const Vec3 k(config.validate.k.data());
  const Vec3c pol = Vec3(config.validate.polarization.data()).normalized().cast<complex>();
  const PlaneWave wave = plane_wave(k, pol, 1.0, config.eps, config.mu, constants);
  const double tol = config.validate.residual_tol;
  try {
    ComplexVectorField A = transform_potential([&](const Point3& p) { return wave.at(p); }, wave.omega,
                                               map, grid, Direction::ToPhysical);
    mask_near_interfaces(A.mask, grid, map, config.validate.interface_cells * h);
    MediumField medium = sample_medium(map, grid, config.eps, config.mu);
    for (std::size_t i = 0; i < grid.size(); ++i) medium.mask[i] |= A.mask[i];
    const ResidualNorm res = maxwell_residual(A, medium, wave.omega, constants);
    acc.add({"maxwell_residual", res.points > 0 && res.relative <= tol, res.relative, tol});

    JacobianField jac = sample_jacobians(map, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) jac.mask[i] |= A.mask[i];
    const ComplexScalarField div = covariant_divergence(A, jac, config.eps);
    ComplexVectorField Aused = A;
    for (std::size_t i = 0; i < grid.size(); ++i) Aused.mask[i] |= div.mask[i];
    const double ref = k.norm() * std::abs(config.eps) * l2_norm(Aused);
    const double divRel = ref > 0.0 ? l2_norm(div) / ref : 0.0;
    acc.add({"gauge_residual", ref > 0.0 && divRel <= tol, divRel, tol});
  } catch (const InterfaceError&) {
    acc.add({"maxwell_residual", false, std::nan(""), tol});
    acc.add({"gauge_residual", false, std::nan(""), tol});
  }

  ValidationReport report;
  report.checks = acc.checks();
  return report;
}

ModesRun run_modes(const RunConfig& config) {
  const PhysicalConstants constants = build_constants(config);
  const std::vector<Mode> modes = build_box_modes(config, constants);
  const MediumField medium = MediumField::uniform(modes.front().A.grid, config.eps, config.mu);

  ModesRun run;
  run.gram = gram_matrix(modes, medium, constants);
  const std::vector<complex> coeffs = draw_coefficients(config.modes.seed, modes.size());
  run.injected = Eigen::Map<const Eigen::VectorXcd>(coeffs.data(), static_cast<Eigen::Index>(coeffs.size()));
  const FieldSnapshot snap = synthesize(modes, coeffs, medium, constants);
  try {
    const ExpansionCoefficients ex = expand_field(snap, modes, medium, constants, config.tolerances.gram_tol);
    run.recovered = ex.a;
    run.reconstructionResidual = ex.reconstructionResidual;
  } catch (const NonOrthonormalBasis&) {
    run.recovered = Eigen::VectorXcd::Constant(run.injected.size(), std::nan(""));
    run.reconstructionResidual = std::nan("");
  }

  std::vector<double> omegas;
  for (const Mode& m : modes) {
    omegas.push_back(m.omega);
    run.labels.push_back(m.label);
  }
  run.omegas = omegas;

  const double period = 2.0 * kPi / modes.front().omega;
  std::vector<double> times;
  for (int i = 1; i <= 40; ++i) times.push_back(period * 10.0 * i / 40.0);
  for (std::size_t j = 0; j < modes.size(); ++j) {
    run.drift = std::max(run.drift, scalar_product_drift(modes[j], modes[(j + 1) % modes.size()], times,
                                                         medium, constants));
  }

  run.energy = energy_integral(modes, coeffs, medium, constants);
  for (std::size_t j = 0; j < modes.size(); ++j) {
    run.oscillatorEnergy += constants.hbar * modes[j].omega * std::norm(coeffs[j]);
  }
  run.zeroPoint = zero_point_sum(omegas, constants);
  return run;
}

fdfd::TMProblem build_solve_problem(const RunConfig& config) {
  const SolveSpec& s = config.solve;
  const CoordinateMap map = build_map(config.map);
  if (!s.control.enabled && !map.z_invariant()) {
    throw ConfigError("map", 0, "the TM solver needs a z-invariant map");
  }
  const double h = s.wavelength / s.cells_per_wavelength;
  const auto inner = static_cast<std::size_t>(std::ceil(s.half_width / h - 1e-9));
  const std::size_t half = inner + static_cast<std::size_t>(s.pml_cells);
  const std::size_t n = 2 * half + 1;
  const double lo = -static_cast<double>(half) * h;
  const Grid grid(Point3(lo, lo, 0.0), {h, h, 1.0}, {n, n, 1});

  fdfd::Boundary boundary;
  boundary.kind = fdfd::BoundaryKind::Pml;
  boundary.pml = {s.pml_cells, s.pml_reflection, s.pml_order};
  fdfd::IncidentWave incident;
  incident.direction = Eigen::Vector2d(s.direction[0], s.direction[1]);
  const double w = s.tfsf_half_width;
  const fdfd::Rect tfsf{-w, w, -w, w};
  const double omega = 2.0 * kPi / s.wavelength;

  if (s.control.enabled) {
    const double radius = s.control.radius;
    const double eps = s.control.eps;
    auto disc = [radius, eps](double x, double y) {
      fdfd::TMMaterial m;
      if (std::hypot(x, y) < radius) m.epsZ = eps;
      return m;
    };
    const fdfd::Subcell subcell{s.subcell_samples, fdfd::layer_normal(CoordinateMap::cylindrical_cloak(radius, 2.0 * radius))};
    return fdfd::make_tm_problem(grid, omega, boundary, incident, tfsf, disc, {}, subcell);
  }

  fdfd::TMMaterial interior;
  interior.epsZ = s.interior_eps;
  const fdfd::MaterialFn material = fdfd::transformation_material(map, config.eps, config.mu, interior);
  fdfd::NodePredicate masked;
  if (const auto* cloak = std::get_if<maps::CylindricalCloak>(&map.kind())) {
    const double R1 = cloak->R1;
    const double width = s.mask_cells * h;
    masked = [R1, width](double x, double y) { return std::abs(std::hypot(x, y) - R1) < width; };
  }
  const fdfd::Subcell subcell{s.subcell_samples, fdfd::layer_normal(map)};
  return fdfd::make_tm_problem(grid, omega, boundary, incident, tfsf, material, masked, subcell);
}

SolveRun run_solve(const RunConfig& config) {
  const SolveSpec& s = config.solve;
  SolveRun run;
  run.problem = build_solve_problem(config);
  const SparseSystem system = fdfd::assemble_tm(run.problem);
  SolveOptions options;
  options.tol = config.tolerances.solver_tol;
  options.kind = s.solver == "krylov" ? SolverKind::Krylov
                 : s.solver == "direct" ? SolverKind::Direct
                                        : SolverKind::Auto;
  options.directLimit = 400000;
  run.solution = fdfd::solve(run.problem, system, options);

  const CoordinateMap map = build_map(config.map);
  fdfd::CloakRegion region;
  std::function<std::optional<complex>(double, double)> expected;
  if (s.control.enabled) {
    region.R1 = region.R2 = s.control.radius;
  } else {
    if (const auto* cloak = std::get_if<maps::CylindricalCloak>(&map.kind())) {
      region.R1 = cloak->R1;
      region.R2 = cloak->R2;
    } else {
      region.R1 = region.R2 = 0.0;
    }
    const fdfd::TMProblem& problem = run.problem;
    expected = [&map, &problem](double x, double y) -> std::optional<complex> {
      const auto q = map_point(map, Point3(x, y, 0.0));
      if (!q) return std::nullopt;
      return fdfd::incident_field(problem, q->x(), q->y());
    };
  }
  run.metrics = fdfd::scattering_metrics(run.problem, run.solution, region, expected);
  return run;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Transformation-media toolkit: tensors, wave renders, checks, modes and TM solves"};
  app.require_subcommand(1);
  std::string configPath;
  std::string outDir;
  int gridN = 0;
  double tol = 0.0;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"tensor", "Export the material tensors on the config grid as CSV"},
      {"wave", "Render the point-source wave in primed and physical space"},
      {"validate", "Run tensor, Gram and covariant-residual checks"},
      {"modes", "Gram matrix, coefficient extraction and energy of box modes"},
      {"solve", "Frequency-domain TM scattering solve"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", configPath, "JSON configuration file")->required();
    sub->add_option("--out", outDir, "Output directory");
    sub->add_option("--grid", gridN, "Grid resolution override");
    sub->add_option("--tol", tol, "Tolerance override");
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  RunConfig config;
  try {
    config = load_config(configPath);
    if (gridN != 0) apply_grid_override(config, command, gridN);
    if (tol != 0.0) {
      if (!(tol > 0.0)) throw ConfigError("--tol", 0, "must be > 0");
      config.tolerances = {tol, tol, tol};
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  }

  const std::filesystem::path dir = output_dir(config, outDir);
  try {
    if (command == "tensor") return cmd_tensor(config, dir, out);
    if (command == "wave") return cmd_wave(config, dir, out);
    if (command == "validate") return cmd_validate(config, dir, out);
    if (command == "modes") return cmd_modes(config, dir, out);
    return cmd_solve(config, dir, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NoConvergence& e) {
    err << "solver error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace tomedia
