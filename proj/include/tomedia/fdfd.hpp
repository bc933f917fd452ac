#pragma once

// 2D frequency-domain TM solver (E_z, H_x, H_y) for z-invariant media with
// anisotropic in-plane mu and scalar eps_z:
//
//   div( M grad E_z ) + (omega/c)^2 eps_z E_z = 0,   M = mu_inplane / det(mu_inplane)
//
// E_z lives on grid nodes, the in-plane material on the x- and y-edges
// between them (Yee placement of H). Fluxes on an x-edge are
// M_xx dE/dx + M_xy dE/dy, with dE/dy averaged from the four surrounding
// nodes; y-edges likewise. Open boundaries use a stretched-coordinate PML
// with a polynomial conductivity profile; plane waves enter through a
// total-field / scattered-field rectangle.

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "tomedia/coordmaps.hpp"
#include "tomedia/fields.hpp"
#include "tomedia/media.hpp"
#include "tomedia/sparse_solve.hpp"

namespace tomedia::fdfd {

struct TMMaterial {
  double epsZ = 1.0;
  Mat2 mu = Mat2::Identity();
};

// Decouples a z-invariant tensor pair into eps_zz and the 2x2 in-plane block
// of mu. Throws NotZInvariant if any xz/yz entry exceeds 1e-12.
TMMaterial reduce_tensor_2d(const MaterialTensors& t);

struct PmlSpec {
  int thickness = 10;        // cells on each side
  double reflection = 1e-6;  // target normal-incidence reflection
  int order = 2;             // polynomial grading of the conductivity
};

enum class BoundaryKind { Pml, Periodic };

struct Boundary {
  BoundaryKind kind = BoundaryKind::Pml;
  PmlSpec pml;
};

struct Rect {
  double xmin, xmax, ymin, ymax;
  bool contains(double x, double y) const {
    return x >= xmin && x <= xmax && y >= ymin && y <= ymax;
  }
};

// Incident plane wave travelling along `direction` (normalized internally).
// The wavenumber is chosen so that the vacuum stencil annihilates the wave
// exactly; see discrete_wavenumber.
struct IncidentWave {
  Eigen::Vector2d direction{1.0, 0.0};
  complex amplitude{1.0, 0.0};
};

using MaterialFn = std::function<TMMaterial(double x, double y)>;
using NodePredicate = std::function<bool(double x, double y)>;

struct TMProblem {
  Grid grid;  // planar: counts[2] == 1
  double omega = 1.0;
  double c = 1.0;
  Boundary boundary;
  IncidentWave incident;
  std::optional<Rect> tfsf;

  std::vector<double> epsZ;   // per node
  std::vector<Mat2> muXEdge;  // edge (i + 1/2, j), indexed like node (i, j)
  std::vector<Mat2> muYEdge;  // edge (i, j + 1/2)
  Mask mask;                  // nodes replaced by the mean of their neighbours
  bool insulateMask = true;   // no flux between unmasked and masked nodes
};

using NormalFn = std::function<Eigen::Vector2d(double x, double y)>;

// Sub-cell material averaging. With samples > 1 every coefficient is averaged
// over samples x samples points of its dual cell: eps_z arithmetically, the
// flux tensor through the layered-medium rule in the frame of `normal`
// (harmonic across, arithmetic along). Without a normal the flux tensor is
// averaged arithmetically.
struct Subcell {
  int samples = 1;
  NormalFn normal;
};

// Normal of the layering a z-invariant map induces: radial for the cloak,
// x for the lens slab, none otherwise.
NormalFn layer_normal(const CoordinateMap& map);

// Samples (or averages) the material at nodes and edges. Nodes where `masked`
// holds become averaging rows. Throws std::invalid_argument for grids smaller
// than 16 x 16, non-planar grids, or a PML thinner than 8 cells.
TMProblem make_tm_problem(const Grid& grid, double omega, const Boundary& boundary,
                          const IncidentWave& incident, std::optional<Rect> tfsf,
                          const MaterialFn& material, const NodePredicate& masked = {},
                          const Subcell& subcell = {}, double c = 1.0);

// Transformation-medium material of a z-invariant map with background eps',
// mu'. Points with no image use `interior`; points on a kink are evaluated a
// hair outward (one-sided limit).
MaterialFn transformation_material(const CoordinateMap& map, double epsPrime, double muPrime,
                                   TMMaterial interior = {});

// Wavenumber k along unit direction d with
//   sum_a (2 - 2 cos(k d_a h_a)) / h_a^2 = (omega/c)^2,
// i.e. the plane wave the vacuum 5-point stencil supports exactly.
double discrete_wavenumber(double omega, double c, double hx, double hy,
                           const Eigen::Vector2d& direction);

// Incident field at (x, y) for the problem's grid and frequency.
complex incident_field(const TMProblem& problem, double x, double y);

// True when the node lies inside the PML layer.
bool in_pml(const TMProblem& problem, std::size_t i, std::size_t j);

// Assembles A x = b. With a TF/SF rectangle, b = (Q A - A Q) e_inc where Q
// selects scattered-field nodes, so the solution holds the total field inside
// the rectangle and the scattered field outside. The preconditioner is A with
// 0.5 i (omega/c)^2 |eps_z| s_x s_y added to each unmasked diagonal entry.
// Throws SingularMu where the in-plane mu is singular at an unmasked sample.
SparseSystem assemble_tm(const TMProblem& problem);

struct Solution {
  ComplexScalarField Ez;  // as stored: total inside TF/SF, scattered outside
  int iterations = 0;
  double relativeResidual = 0.0;
  SolverKind method = SolverKind::Krylov;
};

Solution solve(const TMProblem& problem, const SparseSystem& system, const SolveOptions& options);

// Total field everywhere (adds the incident wave back on scattered-field nodes).
ComplexScalarField total_field(const TMProblem& problem, const Solution& sol);
// Scattered field everywhere (total minus incident).
ComplexScalarField scattered_field(const TMProblem& problem, const Solution& sol);

struct CloakRegion {
  double cx = 0.0, cy = 0.0;
  double R1 = 0.5;
  double R2 = 1.0;
};

struct ScatteringMetrics {
  double externalScatterNorm = 0.0;  // ||E - E_inc|| / ||E_inc|| outside R2
  double interiorLeakNorm = 0.0;     // ||E|| / ||E_inc|| inside R1
  double mappedFieldError = 0.0;     // ||E - E_mapped|| / ||E_mapped|| on unmasked nodes
};

// Norms run over non-PML, unmasked nodes. mappedFieldError is computed only
// when `expected` is supplied (nodes where it returns nullopt are skipped).
ScatteringMetrics scattering_metrics(
    const TMProblem& problem, const Solution& sol, const CloakRegion& region,
    const std::function<std::optional<complex>(double x, double y)>& expected = {});

}  // namespace tomedia::fdfd
