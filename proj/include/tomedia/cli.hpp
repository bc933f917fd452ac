#pragma once

// Command-line orchestration: `tomedia <tensor|wave|validate|modes|solve>
// --config FILE [--out DIR] [--grid N] [--tol X]`.
//
// Exit codes: 0 success, 1 a validation check failed, 2 bad configuration or
// arguments. The output directory comes from the config, then the
// TOMEDIA_OUT_DIR environment variable, then --out (last one wins).

#include <iosfwd>
#include <string>
#include <vector>

#include "tomedia/config.hpp"
#include "tomedia/fdfd.hpp"
#include "tomedia/media.hpp"
#include "tomedia/modes.hpp"

namespace tomedia {

int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Scalar surrogate of the point-source figures: the spherical wave in primed
// space and the same wave carried to physical space by composition.
struct WaveRun {
  ComplexScalarField primed;
  ComplexScalarField physical;
};
WaveRun run_wave(const RunConfig& config);

// Tensor checks over the config grid, the box-mode Gram check and the
// covariant residuals of a transported plane wave.
ValidationReport run_validate(const RunConfig& config);

struct ModesRun {
  GramReport gram;
  Eigen::VectorXcd injected;
  Eigen::VectorXcd recovered;
  std::vector<double> omegas;
  std::vector<int> labels;
  double reconstructionResidual = 0.0;
  double drift = 0.0;
  double energy = 0.0;          // time-averaged energy of the synthesized field
  double oscillatorEnergy = 0.0;  // sum_k hbar omega_k |a_k|^2
  double zeroPoint = 0.0;
};
ModesRun run_modes(const RunConfig& config);

struct SolveRun {
  fdfd::TMProblem problem;
  fdfd::Solution solution;
  fdfd::ScatteringMetrics metrics;
};
// Builds the problem described by the `solve` block (cloak from `map`, or the
// dielectric-disc control), solves it and measures the scattering metrics.
fdfd::TMProblem build_solve_problem(const RunConfig& config);
SolveRun run_solve(const RunConfig& config);

}  // namespace tomedia
