#include "tomedia/coordmaps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/LU>

#include "tomedia/errors.hpp"

namespace tomedia {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Column k of the frame matrix is the global unit vector carrying local axis k.
// Local z is the cylinder axis; the cyclic order keeps the frame right-handed.
Mat3 cylinder_frame(Axis axis) {
  Mat3 P = Mat3::Zero();
  int a = 0, b = 1, c = 2;
  switch (axis) {
    case Axis::X: a = 1; b = 2; c = 0; break;
    case Axis::Y: a = 2; b = 0; c = 1; break;
    case Axis::Z: break;
  }
  P(a, 0) = 1.0;
  P(b, 1) = 1.0;
  P(c, 2) = 1.0;
  return P;
}

double poly_value(const std::vector<double>& c, double r) {
  double acc = 0.0;
  for (std::size_t n = c.size(); n-- > 0;) acc = acc * r + c[n];
  return acc * r;
}

double poly_derivative(const std::vector<double>& c, double r) {
  double acc = 0.0;
  for (std::size_t n = c.size(); n-- > 0;) acc = acc * r + static_cast<double>(n + 1) * c[n];
  return acc;
}

// Solve P(r) = target for the monotone polynomial by safeguarded Newton.
double poly_invert(const std::vector<double>& c, double target) {
  if (target <= 0.0) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (poly_value(c, hi) < target) hi *= 2.0;
  double r = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double f = poly_value(c, r) - target;
    if (f > 0.0) hi = r; else lo = r;
    const double d = poly_derivative(c, r);
    double next = r - f / d;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - r) <= 1e-17 * std::max(1.0, r)) return next;
    r = next;
  }
  return r;
}

Point3 point_from_local(const Mat3& frame, double u, double v, double w) {
  return frame * Vec3(u, v, w);
}

std::optional<Point3> cloak_map(const maps::CylindricalCloak& m, const Point3& p) {
  const Mat3 frame = cylinder_frame(m.axis);
  const Vec3 local = frame.transpose() * p;
  const double r = std::hypot(local.x(), local.y());
  if (r < m.R1) return std::nullopt;
  if (r >= m.R2) return p;
  const double rp = (r - m.R1) * m.R2 / (m.R2 - m.R1);
  const double s = rp / r;
  return point_from_local(frame, local.x() * s, local.y() * s, local.z());
}

std::vector<Point3> cloak_preimages(const maps::CylindricalCloak& m, const Point3& q) {
  const Mat3 frame = cylinder_frame(m.axis);
  const Vec3 local = frame.transpose() * q;
  const double rp = std::hypot(local.x(), local.y());
  if (rp >= m.R2) return {q};
  // The primed axis pulls back to the whole circle r = R1; no finite list.
  if (rp == 0.0) return {};
  const double r = m.R1 + rp * (m.R2 - m.R1) / m.R2;
  const double s = r / rp;
  return {point_from_local(frame, local.x() * s, local.y() * s, local.z())};
}

JacobianData cloak_jacobian(const maps::CylindricalCloak& m, const Point3& p) {
  const Mat3 frame = cylinder_frame(m.axis);
  const Vec3 local = frame.transpose() * p;
  const double r = std::hypot(local.x(), local.y());
  if (std::abs(r - m.R1) < kInterfaceTol || std::abs(r - m.R2) < kInterfaceTol) {
    throw InterfaceError("cylindrical cloak: point on interface r = " + std::to_string(r));
  }
  if (r < m.R1) throw UndefinedImage("cylindrical cloak: point inside the hidden region");
  if (r > m.R2) return make_jacobian_data(Mat3::Identity(), Mat3::Identity());

  const double rp = (r - m.R1) * m.R2 / (m.R2 - m.R1);
  const double radial = (m.R2 - m.R1) / m.R2;  // dr/dr'
  const double azimuthal = r / rp;
  const double c = local.x() / r;
  const double s = local.y() / r;

  // Rotate diag(radial, azimuthal, 1) from (r, phi, z) to the local Cartesian
  // frame, then to global axes.
  Mat3 rot;
  rot << c, -s, 0.0,
         s, c, 0.0,
         0.0, 0.0, 1.0;
  const Mat3 Jlocal = rot * Vec3(radial, azimuthal, 1.0).asDiagonal() * rot.transpose();
  const Mat3 Jinvlocal =
      rot * Vec3(1.0 / radial, 1.0 / azimuthal, 1.0).asDiagonal() * rot.transpose();
  return make_jacobian_data(frame * Jlocal * frame.transpose(),
                            frame * Jinvlocal * frame.transpose());
}

Point3 lens_map(const maps::LensSlab& m, const Point3& p) {
  Point3 q = p;
  if (p.x() < 0.0) {
    q.x() = p.x();
  } else if (p.x() <= m.b) {
    q.x() = -p.x();
  } else {
    q.x() = p.x() - 2.0 * m.b;
  }
  return q;
}

std::vector<Point3> lens_preimages(const maps::LensSlab& m, const Point3& q) {
  std::vector<Point3> out;
  const double s = q.x();
  if (s < 0.0) out.push_back(Point3(s, q.y(), q.z()));
  if (-s >= 0.0 && -s <= m.b) out.push_back(Point3(0.0 - s, q.y(), q.z()));
  if (s + 2.0 * m.b > m.b) out.push_back(Point3(s + 2.0 * m.b, q.y(), q.z()));
  return out;
}

JacobianData lens_jacobian(const maps::LensSlab& m, const Point3& p) {
  if (std::abs(p.x()) < kInterfaceTol || std::abs(p.x() - m.b) < kInterfaceTol) {
    throw InterfaceError("lens slab: point on interface x = " + std::to_string(p.x()));
  }
  if (p.x() > 0.0 && p.x() < m.b) {
    const Mat3 flip = Vec3(-1.0, 1.0, 1.0).asDiagonal();
    return make_jacobian_data(flip, flip);
  }
  return make_jacobian_data(Mat3::Identity(), Mat3::Identity());
}

Point3 radial_map(const maps::RadialPolynomial& m, const Point3& p) {
  const double r = p.norm();
  if (r == 0.0) return p;
  return p * (poly_value(m.coeffs, r) / r);
}

std::vector<Point3> radial_preimages(const maps::RadialPolynomial& m, const Point3& q) {
  const double rp = q.norm();
  if (rp == 0.0) return {q};
  const double r = poly_invert(m.coeffs, rp);
  return {Point3(q * (r / rp))};
}

JacobianData radial_jacobian(const maps::RadialPolynomial& m, const Point3& p) {
  const double r = p.norm();
  if (r < kInterfaceTol) throw InterfaceError("radial polynomial: point at the origin");
  const double rp = poly_value(m.coeffs, r);
  const double slope = poly_derivative(m.coeffs, r);  // dr'/dr
  const Vec3 n = p / r;
  const Mat3 radial = n * n.transpose();
  const Mat3 tangential = Mat3::Identity() - radial;
  return make_jacobian_data((r / rp) * tangential + (1.0 / slope) * radial,
                            (rp / r) * tangential + slope * radial);
}

void sort_points(std::vector<Point3>& pts) {
  std::sort(pts.begin(), pts.end(), [](const Point3& a, const Point3& b) {
    if (a.x() != b.x()) return a.x() < b.x();
    if (a.y() != b.y()) return a.y() < b.y();
    return a.z() < b.z();
  });
}

}  // namespace

JacobianData make_jacobian_data(const Mat3& J, const Mat3& Jinv) {
  JacobianData d;
  d.J = J;
  d.Jinv = Jinv;
  d.detJ = J.determinant();
  d.sign = d.detJ < 0.0 ? -1 : 1;
  d.gammaUpper = J * J.transpose();
  d.gammaLower = Jinv.transpose() * Jinv;
  d.gamma = d.gammaLower.determinant();
  return d;
}

CoordinateMap CoordinateMap::identity() { return CoordinateMap(maps::Identity{}); }

CoordinateMap CoordinateMap::cylindrical_cloak(double R1, double R2, Axis axis) {
  if (!(R1 > 0.0) || !(R2 > R1) || !std::isfinite(R2)) {
    throw std::invalid_argument("cylindrical_cloak requires 0 < R1 < R2");
  }
  return CoordinateMap(maps::CylindricalCloak{R1, R2, axis});
}

CoordinateMap CoordinateMap::lens_slab(double b) {
  if (!(b > 0.0) || !std::isfinite(b)) throw std::invalid_argument("lens_slab requires b > 0");
  return CoordinateMap(maps::LensSlab{b});
}

CoordinateMap CoordinateMap::radial_polynomial(std::vector<double> coeffs) {
  if (coeffs.empty() || !(coeffs.front() > 0.0)) {
    throw std::invalid_argument("radial_polynomial requires a positive linear coefficient");
  }
  for (double c : coeffs) {
    if (!(c >= 0.0) || !std::isfinite(c)) {
      throw std::invalid_argument("radial_polynomial coefficients must be finite and >= 0");
    }
  }
  return CoordinateMap(maps::RadialPolynomial{std::move(coeffs)});
}

CoordinateMap CoordinateMap::compose(CoordinateMap first, CoordinateMap second) {
  return CoordinateMap(maps::Composite{std::make_shared<const CoordinateMap>(std::move(first)),
                                       std::make_shared<const CoordinateMap>(std::move(second))});
}

std::string_view CoordinateMap::kind_name() const {
  return std::visit(overloaded{
                        [](const maps::Identity&) { return std::string_view("identity"); },
                        [](const maps::CylindricalCloak&) {
                          return std::string_view("cylindrical_cloak");
                        },
                        [](const maps::LensSlab&) { return std::string_view("lens_slab"); },
                        [](const maps::RadialPolynomial&) {
                          return std::string_view("radial_polynomial");
                        },
                        [](const maps::Composite&) { return std::string_view("composite"); },
                    },
                    kind_);
}

bool CoordinateMap::z_invariant() const {
  return std::visit(overloaded{
                        [](const maps::Identity&) { return true; },
                        [](const maps::CylindricalCloak& m) { return m.axis == Axis::Z; },
                        [](const maps::LensSlab&) { return true; },
                        [](const maps::RadialPolynomial&) { return false; },
                        [](const maps::Composite& m) {
                          return m.first->z_invariant() && m.second->z_invariant();
                        },
                    },
                    kind_);
}

std::optional<Point3> map_point(const CoordinateMap& map, const Point3& p) {
  return std::visit(overloaded{
                        [&](const maps::Identity&) -> std::optional<Point3> { return p; },
                        [&](const maps::CylindricalCloak& m) { return cloak_map(m, p); },
                        [&](const maps::LensSlab& m) -> std::optional<Point3> {
                          return lens_map(m, p);
                        },
                        [&](const maps::RadialPolynomial& m) -> std::optional<Point3> {
                          return radial_map(m, p);
                        },
                        [&](const maps::Composite& m) -> std::optional<Point3> {
                          const auto mid = map_point(*m.first, p);
                          if (!mid) return std::nullopt;
                          return map_point(*m.second, *mid);
                        },
                    },
                    map.kind());
}

std::vector<Point3> preimages(const CoordinateMap& map, const Point3& primed) {
  return std::visit(overloaded{
                        [&](const maps::Identity&) { return std::vector<Point3>{primed}; },
                        [&](const maps::CylindricalCloak& m) { return cloak_preimages(m, primed); },
                        [&](const maps::LensSlab& m) { return lens_preimages(m, primed); },
                        [&](const maps::RadialPolynomial& m) {
                          return radial_preimages(m, primed);
                        },
                        [&](const maps::Composite& m) {
                          std::vector<Point3> out;
                          for (const Point3& mid : preimages(*m.second, primed)) {
                            for (const Point3& q : preimages(*m.first, mid)) out.push_back(q);
                          }
                          sort_points(out);
                          return out;
                        },
                    },
                    map.kind());
}

JacobianData jacobian(const CoordinateMap& map, const Point3& p) {
  return std::visit(
      overloaded{
          [&](const maps::Identity&) {
            return make_jacobian_data(Mat3::Identity(), Mat3::Identity());
          },
          [&](const maps::CylindricalCloak& m) { return cloak_jacobian(m, p); },
          [&](const maps::LensSlab& m) { return lens_jacobian(m, p); },
          [&](const maps::RadialPolynomial& m) { return radial_jacobian(m, p); },
          [&](const maps::Composite& m) {
            const auto mid = map_point(*m.first, p);
            if (!mid) throw UndefinedImage("composite map: inner map undefined");
            const JacobianData inner = jacobian(*m.first, p);
            const JacobianData outer = jacobian(*m.second, *mid);
            // dx/dx' = dx/dy * dy/dx'
            return make_jacobian_data(inner.J * outer.J, outer.Jinv * inner.Jinv);
          },
      },
      map.kind());
}

std::optional<JacobianData> jacobian_fd(const CoordinateMap& map, const Point3& p, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("jacobian_fd requires h > 0");
  const auto centre = map_point(map, p);
  if (!centre) return std::nullopt;

  auto branch = [&](const Point3& q) -> std::optional<Point3> {
    const auto pts = preimages(map, q);
    if (pts.empty()) return std::nullopt;
    const Point3* best = &pts.front();
    for (const Point3& c : pts) {
      if ((c - p).squaredNorm() < (*best - p).squaredNorm()) best = &c;
    }
    return *best;
  };

  const double reach = interface_distance(map, p);
  Mat3 J;
  for (int j = 0; j < 3; ++j) {
    Vec3 step = Vec3::Zero();
    step[j] = h;
    const auto plus = branch(*centre + step);
    const auto minus = branch(*centre - step);
    if (!plus || !minus) return std::nullopt;
    if ((*plus - p).norm() >= reach || (*minus - p).norm() >= reach) return std::nullopt;
    J.col(j) = (*plus - *minus) / (2.0 * h);
  }
  return make_jacobian_data(J, J.inverse());
}

double interface_distance(const CoordinateMap& map, const Point3& p) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return std::visit(overloaded{
                        [&](const maps::Identity&) { return inf; },
                        [&](const maps::CylindricalCloak& m) {
                          const Vec3 local = cylinder_frame(m.axis).transpose() * p;
                          const double r = std::hypot(local.x(), local.y());
                          return std::min(std::abs(r - m.R1), std::abs(r - m.R2));
                        },
                        [&](const maps::LensSlab& m) {
                          return std::min(std::abs(p.x()), std::abs(p.x() - m.b));
                        },
                        [&](const maps::RadialPolynomial&) { return p.norm(); },
                        [&](const maps::Composite& m) {
                          const double d1 = interface_distance(*m.first, p);
                          const auto mid = map_point(*m.first, p);
                          if (!mid) return d1;
                          return std::min(d1, interface_distance(*m.second, *mid));
                        },
                    },
                    map.kind());
}

}  // namespace tomedia
