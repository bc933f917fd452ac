#pragma once

// Coordinate transformations between physical space (x) and the transformed,
// "electromagnetic" space (x'). Every map is stored in closed form in both
// directions; physical -> primed is the canonical query direction.

#include <memory>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "tomedia/types.hpp"

namespace tomedia {

// Distance below which a point counts as sitting on a map kink.
inline constexpr double kInterfaceTol = 1e-12;

enum class Axis { X, Y, Z };

// J = dx/dx' together with the induced spatial metric.
//   gammaUpper = J J^T, gammaLower = its inverse, gamma = det(gammaLower).
struct JacobianData {
  Mat3 J;
  Mat3 Jinv;  // dx'/dx
  double detJ = 1.0;
  int sign = 1;
  Mat3 gammaUpper;
  Mat3 gammaLower;
  double gamma = 1.0;
};

// Assemble the metric data from an analytic Jacobian and its inverse.
JacobianData make_jacobian_data(const Mat3& J, const Mat3& Jinv);

class CoordinateMap;

namespace maps {

struct Identity {};

// r = R1 + r' (R2 - R1) / R2 for r' < R2, identity outside. The hole r < R1
// has no primed image.
struct CylindricalCloak {
  double R1;
  double R2;
  Axis axis = Axis::Z;
};

// x' = x (x < 0), -x (0 <= x <= b), x - 2b (x > b).
struct LensSlab {
  double b;
};

// Spherical radial map r' = sum_n coeffs[n-1] r^n, n >= 1. Coefficients are
// non-negative with a positive linear term, so the map is monotone.
struct RadialPolynomial {
  std::vector<double> coeffs;
};

// x -> first -> second -> x'.
struct Composite {
  std::shared_ptr<const CoordinateMap> first;
  std::shared_ptr<const CoordinateMap> second;
};

}  // namespace maps

class CoordinateMap {
 public:
  using Kind = std::variant<maps::Identity, maps::CylindricalCloak, maps::LensSlab,
                            maps::RadialPolynomial, maps::Composite>;

  CoordinateMap() : kind_(maps::Identity{}) {}

  static CoordinateMap identity();
  static CoordinateMap cylindrical_cloak(double R1, double R2, Axis axis = Axis::Z);
  static CoordinateMap lens_slab(double b);
  static CoordinateMap radial_polynomial(std::vector<double> coeffs);
  static CoordinateMap compose(CoordinateMap first, CoordinateMap second);

  const Kind& kind() const { return kind_; }
  std::string_view kind_name() const;
  bool is_identity() const { return std::holds_alternative<maps::Identity>(kind_); }

  // True for maps that leave the z coordinate untouched and whose Jacobian
  // has z row/column (0,0,1).
  bool z_invariant() const;

 private:
  explicit CoordinateMap(Kind k) : kind_(std::move(k)) {}
  Kind kind_;
};

// Physical -> primed. nullopt when the point has no primed image.
std::optional<Point3> map_point(const CoordinateMap& map, const Point3& p);

// Primed -> physical, every branch, ordered by physical x (then y, z).
std::vector<Point3> preimages(const CoordinateMap& map, const Point3& primed);

// Analytic Jacobian at the physical point p. Throws InterfaceError on kinks
// and UndefinedImage where map_point has no value.
JacobianData jacobian(const CoordinateMap& map, const Point3& p);

// Central-difference Jacobian taken in primed space, following the preimage
// branch that contains p. nullopt when a stencil point has no preimage or
// lies farther from p than the nearest kink.
std::optional<JacobianData> jacobian_fd(const CoordinateMap& map, const Point3& p, double h);

// Euclidean distance (in physical space) from p to the nearest kink.
double interface_distance(const CoordinateMap& map, const Point3& p);

}  // namespace tomedia
