#include "tomedia/fields.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <Eigen/Geometry>

#include "tomedia/errors.hpp"

namespace tomedia {

Vec3c PlaneWave::at(const Point3& p) const {
  const complex phase = std::exp(complex(0.0, k.dot(p)));
  return pol * (amp * phase);
}

Vec3c PlaneWave::curl_at(const Point3& p) const {
  const Vec3c a = at(p);
  const Vec3c kc = k.cast<complex>();
  return complex(0.0, 1.0) * cross_product(kc, a);
}

PlaneWave plane_wave(const Vec3& k, const Vec3c& pol, complex amp, double epsPrime,
                     double muPrime, const PhysicalConstants& constants) {
  const double kn = k.norm();
  if (!(kn > 0.0)) throw std::invalid_argument("plane_wave requires |k| > 0");
  if (!(epsPrime * muPrime > 0.0)) {
    throw std::invalid_argument("plane_wave requires eps' mu' > 0");
  }
  const double pn = pol.norm();
  if (!(pn > 0.0)) throw std::invalid_argument("plane_wave requires a non-zero polarization");
  // Eigen conjugates pol in dot(); k is real, so the modulus is |pol.k|.
  const complex longitudinal = pol.dot(k.cast<complex>());
  if (std::abs(longitudinal) / (pn * kn) > 1e-12) {
    throw NonTransversePolarization("plane_wave: polarization is not transverse to k");
  }
  PlaneWave w;
  w.k = k;
  w.pol = pol;
  w.amp = amp;
  w.omega = constants.c * kn / std::sqrt(epsPrime * muPrime);
  return w;
}

ComplexVectorField sample(const PlaneWave& wave, const Grid& grid) {
  ComplexVectorField f(grid, wave.omega, FieldRole::A);
  for (std::size_t n = 0; n < grid.size(); ++n) f.values[n] = wave.at(grid.point(n));
  return f;
}

complex SphericalWave::at(const Point3& p) const {
  const double R = (p - source).norm();
  return std::exp(complex(0.0, k * R)) / (4.0 * std::numbers::pi * R);
}

ComplexScalarField spherical_wave_scalar(const Point3& source, double k, const Grid& grid,
                                         const PhysicalConstants& constants) {
  if (!(k > 0.0)) throw std::invalid_argument("spherical_wave_scalar requires k > 0");
  ComplexScalarField f(grid, constants.c * k);
  const SphericalWave wave{source, k};
  std::size_t nearest = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < grid.size(); ++n) {
    const Point3 p = grid.point(n);
    const double d = (p - source).squaredNorm();
    if (d < best) {
      best = d;
      nearest = n;
    }
    f.values[n] = wave.at(p);
  }
  f.values[nearest] = complex{};
  f.mask[nearest] |= mask::kSingular;
  return f;
}

ComplexVectorField transform_potential(const VectorFieldFn& field, double omega,
                                       const CoordinateMap& map, const Grid& target,
                                       Direction direction, FieldRole role) {
  ComplexVectorField out(target, omega, role);
  for (std::size_t n = 0; n < target.size(); ++n) {
    const Point3 p = target.point(n);
    if (map.is_identity()) {
      out.values[n] = field(p);
      continue;
    }
    if (direction == Direction::ToPhysical) {
      const auto primed = map_point(map, p);
      if (!primed) {
        out.mask[n] |= mask::kUndefined;
        continue;
      }
      const JacobianData jac = jacobian(map, p);
      out.values[n] = jac.Jinv.transpose().cast<complex>() * field(*primed);
    } else {
      const auto pre = preimages(map, p);
      if (pre.empty()) {
        out.mask[n] |= mask::kUndefined;
        continue;
      }
      const JacobianData jac = jacobian(map, pre.front());
      out.values[n] = jac.J.transpose().cast<complex>() * field(pre.front());
    }
  }
  return out;
}

ComplexScalarField transform_scalar(const ScalarFieldFn& field, double omega,
                                    const CoordinateMap& map, const Grid& target,
                                    Direction direction, std::optional<Point3> singularPoint,
                                    double singularRadius) {
  ComplexScalarField out(target, omega);
  for (std::size_t n = 0; n < target.size(); ++n) {
    const Point3 p = target.point(n);
    std::optional<Point3> image;
    if (direction == Direction::ToPhysical) {
      image = map_point(map, p);
    } else {
      const auto pre = preimages(map, p);
      if (!pre.empty()) image = pre.front();
    }
    if (!image) {
      out.mask[n] |= mask::kUndefined;
      continue;
    }
    if (singularPoint && (*image - *singularPoint).norm() <= singularRadius) {
      out.mask[n] |= mask::kSingular;
      continue;
    }
    out.values[n] = field(*image);
  }
  return out;
}

JacobianField sample_jacobians(const CoordinateMap& map, const Grid& grid) {
  JacobianField f{grid, std::vector<JacobianData>(grid.size()), Mask(grid.size(), 0)};
  const JacobianData unit = make_jacobian_data(Mat3::Identity(), Mat3::Identity());
  for (std::size_t n = 0; n < grid.size(); ++n) {
    try {
      f.values[n] = jacobian(map, grid.point(n));
    } catch (const InterfaceError&) {
      f.values[n] = unit;
      f.mask[n] |= mask::kInterface;
    } catch (const UndefinedImage&) {
      f.values[n] = unit;
      f.mask[n] |= mask::kUndefined;
    }
  }
  return f;
}

MediumField MediumField::uniform(const Grid& grid, double epsPrime, double muPrime) {
  return uniform(grid, epsPrime * Mat3::Identity(), muPrime * Mat3::Identity());
}

MediumField MediumField::uniform(const Grid& grid, const Mat3& eps, const Mat3& mu) {
  return MediumField{grid, std::vector<Mat3>(grid.size(), eps), std::vector<Mat3>(grid.size(), mu),
                     Mask(grid.size(), 0)};
}

MediumField sample_medium(const CoordinateMap& map, const Grid& grid, double epsPrime,
                          double muPrime) {
  const JacobianField jac = sample_jacobians(map, grid);
  MediumField m{grid, std::vector<Mat3>(grid.size(), Mat3::Zero()),
                std::vector<Mat3>(grid.size(), Mat3::Zero()), jac.mask};
  for (std::size_t n = 0; n < grid.size(); ++n) {
    if (m.mask[n]) continue;
    const MaterialTensors t = material_tensors(jac.values[n], epsPrime, muPrime);
    m.eps[n] = t.eps;
    m.mu[n] = t.mu;
  }
  return m;
}

void mask_where(Mask& m, const Grid& grid, const std::function<bool(const Point3&)>& pred,
                std::uint8_t bit) {
  if (m.size() != grid.size()) throw GridMismatch("mask_where: mask size differs from grid");
  for (std::size_t n = 0; n < grid.size(); ++n) {
    if (pred(grid.point(n))) m[n] |= bit;
  }
}

void mask_near_interfaces(Mask& m, const Grid& grid, const CoordinateMap& map, double width) {
  mask_where(
      m, grid, [&](const Point3& p) { return interface_distance(map, p) < width; },
      mask::kInterface);
}

}  // namespace tomedia
