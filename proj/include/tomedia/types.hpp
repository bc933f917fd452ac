#pragma once

#include <complex>

#include <Eigen/Core>

namespace tomedia {

using complex = std::complex<double>;

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec3c = Eigen::Vector3cd;
using Mat2 = Eigen::Matrix2d;

// Cartesian position in device units.
using Point3 = Vec3;

// Plain a x b for complex vectors (Eigen's cross conjugates complex results).
inline Vec3c cross_product(const Vec3c& a, const Vec3c& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

inline bool is_finite(const Point3& p) { return p.allFinite(); }

}  // namespace tomedia
