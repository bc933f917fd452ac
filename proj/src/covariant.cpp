#include "tomedia/covariant.hpp"

#include <cmath>
#include <optional>

#include <Eigen/LU>

#include "tomedia/errors.hpp"

namespace tomedia {

namespace {

// Neighbour index along `axis`, or nullopt at the grid edge.
std::optional<std::size_t> neighbour(const Grid& g, std::size_t n, int axis, int dir) {
  auto c = g.coords(n);
  const auto a = static_cast<std::size_t>(axis);
  if (dir < 0) {
    if (c[a] == 0) return std::nullopt;
    --c[a];
  } else {
    if (c[a] + 1 >= g.count(axis)) return std::nullopt;
    ++c[a];
  }
  return g.index(c[0], c[1], c[2]);
}

// True when n and its active-axis neighbours are all unmasked.
bool stencil_ok(const Grid& g, const Mask& m, std::size_t n) {
  if (m[n]) return false;
  for (int a = 0; a < 3; ++a) {
    if (!g.active(a)) continue;
    const auto lo = neighbour(g, n, a, -1);
    const auto hi = neighbour(g, n, a, +1);
    if (!lo || !hi || m[*lo] || m[*hi]) return false;
  }
  return true;
}

Mask combine(const Mask& a, const Mask& b) {
  Mask out(a.size());
  for (std::size_t n = 0; n < a.size(); ++n) out[n] = a[n] | b[n];
  return out;
}

// Central-difference Cartesian curl of values on the points where
// stencil_ok(valid) holds; other points are masked kStencil.
ComplexVectorField curl_values(const Grid& g, const std::vector<Vec3c>& values, const Mask& valid,
                               double omega, FieldRole role) {
  ComplexVectorField out(g, omega, role);
  for (std::size_t n = 0; n < g.size(); ++n) {
    if (!stencil_ok(g, valid, n)) {
      out.mask[n] = valid[n] | mask::kStencil;
      continue;
    }
    // d[a] = derivative of every component along axis a.
    Vec3c d[3] = {Vec3c::Zero(), Vec3c::Zero(), Vec3c::Zero()};
    for (int a = 0; a < 3; ++a) {
      if (!g.active(a)) continue;
      d[a] = (values[*neighbour(g, n, a, +1)] - values[*neighbour(g, n, a, -1)]) / (2.0 * g.h(a));
    }
    out.values[n] = Vec3c(d[1][2] - d[2][1], d[2][0] - d[0][2], d[0][1] - d[1][0]);
  }
  return out;
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (a != b) throw GridMismatch(std::string(what) + ": grids differ");
}

}  // namespace

ComplexScalarField covariant_divergence(const ComplexVectorField& field, const JacobianField& jac,
                                        double epsPrime) {
  require_same_grid(field.grid, jac.grid, "covariant_divergence");
  const Grid& g = field.grid;
  const Mask valid = combine(field.mask, jac.mask);

  std::vector<Vec3c> flux(g.size(), Vec3c::Zero());
  for (std::size_t n = 0; n < g.size(); ++n) {
    if (valid[n]) continue;
    const JacobianData& J = jac.values[n];
    flux[n] = (std::sqrt(J.gamma) * epsPrime * J.gammaUpper).cast<complex>() * field.values[n];
  }

  ComplexScalarField out(g, field.omega);
  for (std::size_t n = 0; n < g.size(); ++n) {
    if (!stencil_ok(g, valid, n)) {
      out.mask[n] = valid[n] | mask::kStencil;
      continue;
    }
    complex sum{};
    for (int a = 0; a < 3; ++a) {
      if (!g.active(a)) continue;
      sum += (flux[*neighbour(g, n, a, +1)][a] - flux[*neighbour(g, n, a, -1)][a]) /
             (2.0 * g.h(a));
    }
    out.values[n] = sum / std::sqrt(jac.values[n].gamma);
  }
  return out;
}

ComplexVectorField covariant_curl(const ComplexVectorField& field, const JacobianField& jac,
                                  FieldRole role) {
  require_same_grid(field.grid, jac.grid, "covariant_curl");
  const Mask valid = combine(field.mask, jac.mask);
  ComplexVectorField out = curl_values(field.grid, field.values, valid, field.omega, role);
  for (std::size_t n = 0; n < out.values.size(); ++n) {
    if (out.mask[n]) continue;
    const JacobianData& J = jac.values[n];
    out.values[n] *= static_cast<double>(J.sign) / std::sqrt(J.gamma);
  }
  return out;
}

ComplexVectorField discrete_curl(const ComplexVectorField& field, FieldRole role) {
  return curl_values(field.grid, field.values, field.mask, field.omega, role);
}

ResidualNorm maxwell_residual(const ComplexVectorField& A, const MediumField& medium,
                              double omega, const PhysicalConstants& constants) {
  require_same_grid(A.grid, medium.grid, "maxwell_residual");
  const Grid& g = A.grid;
  const Mask valid = combine(A.mask, medium.mask);

  const ComplexVectorField B = curl_values(g, A.values, valid, omega, FieldRole::B);
  std::vector<Vec3c> H(g.size(), Vec3c::Zero());
  for (std::size_t n = 0; n < g.size(); ++n) {
    if (B.mask[n]) continue;
    const Mat3& mu = medium.mu[n];
    const double det = mu.determinant();
    if (!std::isfinite(det) || std::abs(det) < 1e-14 * std::max(1.0, mu.cwiseAbs().maxCoeff())) {
      throw SingularTensor("maxwell_residual: singular mu at an unmasked point");
    }
    H[n] = mu.inverse().cast<complex>() * B.values[n];
  }
  const ComplexVectorField curlH = curl_values(g, H, B.mask, omega, FieldRole::D);

  const double k2 = omega * omega / (constants.c * constants.c);
  double num = 0.0, den = 0.0;
  std::size_t count = 0;
  for (std::size_t n = 0; n < g.size(); ++n) {
    if (curlH.mask[n]) continue;
    const Vec3c source = k2 * (medium.eps[n].cast<complex>() * A.values[n]);
    num += (curlH.values[n] - source).squaredNorm();
    den += source.squaredNorm();
    ++count;
  }
  const double dv = g.cell_volume();
  ResidualNorm r;
  r.absolute = std::sqrt(num * dv);
  r.relative = den > 0.0 ? std::sqrt(num / den) : 0.0;
  r.points = count;
  return r;
}

double l2_norm(const ComplexScalarField& f) {
  double s = 0.0;
  for (std::size_t n = 0; n < f.values.size(); ++n) {
    if (!f.mask[n]) s += std::norm(f.values[n]);
  }
  return std::sqrt(s * f.grid.cell_volume());
}

double l2_norm(const ComplexVectorField& f) {
  double s = 0.0;
  for (std::size_t n = 0; n < f.values.size(); ++n) {
    if (!f.mask[n]) s += f.values[n].squaredNorm();
  }
  return std::sqrt(s * f.grid.cell_volume());
}

}  // namespace tomedia
