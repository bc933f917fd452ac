#pragma once

// Monochromatic fields on uniform grids, analytic sources, and transport of
// fields between primed (electromagnetic) space and physical space.
//
// Time convention: A(r, t) = Re[A(r) exp(-i omega t)].

#include <functional>
#include <optional>
#include <vector>

#include "tomedia/coordmaps.hpp"
#include "tomedia/grid.hpp"
#include "tomedia/media.hpp"
#include "tomedia/types.hpp"

namespace tomedia {

struct PhysicalConstants {
  double eps0 = 1.0;
  double c = 1.0;
  double hbar = 1.0;

  static PhysicalConstants natural() { return {}; }
  static PhysicalConstants si() { return {8.8541878128e-12, 299792458.0, 1.054571817e-34}; }
  bool operator==(const PhysicalConstants&) const = default;
};

enum class FieldRole { A, E, B, D, H };

struct ComplexScalarField {
  Grid grid;
  double omega = 1.0;
  std::vector<complex> values;
  Mask mask;

  ComplexScalarField() = default;
  ComplexScalarField(Grid g, double w)
      : grid(std::move(g)), omega(w), values(grid.size(), complex{}), mask(grid.size(), 0) {}
};

struct ComplexVectorField {
  Grid grid;
  double omega = 1.0;
  FieldRole role = FieldRole::A;
  std::vector<Vec3c> values;
  Mask mask;

  ComplexVectorField() = default;
  ComplexVectorField(Grid g, double w, FieldRole r)
      : grid(std::move(g)), omega(w), role(r), values(grid.size(), Vec3c::Zero()),
        mask(grid.size(), 0) {}
};

using VectorFieldFn = std::function<Vec3c(const Point3&)>;
using ScalarFieldFn = std::function<complex(const Point3&)>;

// A(r) = amp * pol * exp(i k.r) in a uniform background eps', mu'.
struct PlaneWave {
  Vec3 k;
  Vec3c pol;
  complex amp{1.0, 0.0};
  double omega = 1.0;

  Vec3c at(const Point3& p) const;
  // Analytic curl: i k x A.
  Vec3c curl_at(const Point3& p) const;
};

// omega = c |k| / sqrt(eps' mu'). Throws NonTransversePolarization when
// |pol.k| / (|pol||k|) > 1e-12, std::invalid_argument for k = 0.
PlaneWave plane_wave(const Vec3& k, const Vec3c& pol, complex amp, double epsPrime,
                     double muPrime, const PhysicalConstants& constants = {});

ComplexVectorField sample(const PlaneWave& wave, const Grid& grid);

// Scalar outgoing wave exp(i k R) / (4 pi R).
struct SphericalWave {
  Point3 source;
  double k = 1.0;

  complex at(const Point3& p) const;
};

// Samples the spherical wave; the grid point nearest the source is flagged
// singular, zeroed, and excluded from norms.
ComplexScalarField spherical_wave_scalar(const Point3& source, double k, const Grid& grid,
                                         const PhysicalConstants& constants = {});

enum class Direction { ToPhysical, ToPrimed };

// Covector transport A'_i = sum_j J^j_i A_j. ToPhysical samples the primed
// field at x'(x) and applies J^-T; ToPrimed samples the physical field on the
// first preimage of each primed grid point and applies J^T. Points without an
// image get value zero and mask::kUndefined. InterfaceError from the Jacobian
// propagates.
ComplexVectorField transform_potential(const VectorFieldFn& field, double omega,
                                       const CoordinateMap& map, const Grid& target,
                                       Direction direction, FieldRole role = FieldRole::A);

// Scalar transport by composition phi(x) = phi'(x'(x)). Points whose image
// falls within singularRadius of singularPoint are masked kSingular.
ComplexScalarField transform_scalar(const ScalarFieldFn& field, double omega,
                                    const CoordinateMap& map, const Grid& target,
                                    Direction direction,
                                    std::optional<Point3> singularPoint = std::nullopt,
                                    double singularRadius = 0.0);

// Per-point Jacobian data; undefined and interface points are masked.
struct JacobianField {
  Grid grid;
  std::vector<JacobianData> values;
  Mask mask;
};

JacobianField sample_jacobians(const CoordinateMap& map, const Grid& grid);

// Per-point eps and mu. The tensors need not be symmetric, which lets the
// mode layer inject counterexamples.
struct MediumField {
  Grid grid;
  std::vector<Mat3> eps;
  std::vector<Mat3> mu;
  Mask mask;

  static MediumField uniform(const Grid& grid, double epsPrime, double muPrime);
  static MediumField uniform(const Grid& grid, const Mat3& eps, const Mat3& mu);
};

// Transformation-medium tensors for every grid point. Points without a
// Jacobian (hole, kink) are masked and carry zero tensors.
MediumField sample_medium(const CoordinateMap& map, const Grid& grid, double epsPrime,
                          double muPrime);

// Sets `bit` on every point where pred(point) holds.
void mask_where(Mask& m, const Grid& grid, const std::function<bool(const Point3&)>& pred,
                std::uint8_t bit = mask::kExcluded);

// Masks points within `width` of any map kink.
void mask_near_interfaces(Mask& m, const Grid& grid, const CoordinateMap& map, double width);

}  // namespace tomedia
