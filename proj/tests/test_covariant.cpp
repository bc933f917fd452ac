#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "tomedia/covariant.hpp"
#include "tomedia/errors.hpp"

using namespace tomedia;

namespace {

const complex I{0.0, 1.0};
constexpr double kPi = std::numbers::pi;

Grid square(std::size_t n) { return Grid::cell_centred({-2, -2, 0}, {2, 2, 0}, {n, n, 1}); }

ComplexVectorField transported(const PlaneWave& w, const CoordinateMap& map, const Grid& g, double band) {
  auto A = transform_potential([&](const Point3& p) { return w.at(p); }, w.omega, map, g,
                               Direction::ToPhysical);
  mask_near_interfaces(A.mask, g, map, band);
  return A;
}

JacobianField jacobians_for(const CoordinateMap& map, const ComplexVectorField& A) {
  JacobianField jac = sample_jacobians(map, A.grid);
  for (std::size_t n = 0; n < A.grid.size(); ++n) jac.mask[n] |= A.mask[n];
  return jac;
}

// L2 norm of (computed - expected) over the unmasked points of `computed`.
double scalar_error(const ComplexScalarField& f, const std::function<complex(const Point3&)>& expected) {
  double s = 0.0;
  for (std::size_t n = 0; n < f.values.size(); ++n) {
    if (!f.mask[n]) s += std::norm(f.values[n] - expected(f.grid.point(n)));
  }
  return std::sqrt(s * f.grid.cell_volume());
}

double vector_error(const ComplexVectorField& f, const std::function<Vec3c(const Point3&)>& expected) {
  double s = 0.0;
  for (std::size_t n = 0; n < f.values.size(); ++n) {
    if (!f.mask[n]) s += (f.values[n] - expected(f.grid.point(n))).squaredNorm();
  }
  return std::sqrt(s * f.grid.cell_volume());
}

}  // namespace

TEST_CASE("flat divergence of a transverse plane wave is second order") {
  const auto w = plane_wave({2 * kPi, kPi, 0}, Vec3(-1, 2, 0).normalized().cast<complex>(), 1.0, 1.0, 1.0);
  const auto id = CoordinateMap::identity();
  const auto A1 = transported(w, id, square(64), 0);
  const double e1 = l2_norm(covariant_divergence(A1, jacobians_for(id, A1), 1.0));
  const auto A2 = transported(w, id, square(128), 0);
  const double e2 = l2_norm(covariant_divergence(A2, jacobians_for(id, A2), 1.0));
  CHECK(e1 > 0.0);
  CHECK(std::log2(e1 / e2) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("longitudinal wave divergence matches the analytic derivative") {
  PlaneWave w;
  w.k = Vec3(3.0, 0, 0);
  w.pol = Vec3c(1, 0, 0);
  w.omega = 3.0;
  const double epsPrime = 2.0;
  const auto id = CoordinateMap::identity();
  auto expected = [&](const Point3& p) { return I * epsPrime * 3.0 * std::exp(I * 3.0 * p.x()); };
  double prev = 0.0;
  for (std::size_t n : {64, 128}) {
    const auto A = transported(w, id, square(n), 0);
    const double err = scalar_error(covariant_divergence(A, jacobians_for(id, A), epsPrime), expected);
    if (prev > 0.0) CHECK(std::log2(prev / err) == doctest::Approx(2.0).epsilon(0.1));
    prev = err;
  }
}

TEST_CASE("two-path divergence through the cloak") {
  PlaneWave w;
  w.k = Vec3(2 * kPi, 0, 0);
  w.pol = Vec3c(1, 0, 0);
  w.omega = 2 * kPi;
  const auto cloak = CoordinateMap::cylindrical_cloak(0.5, 1.0);
  auto expected = [&](const Point3& p) {
    const Point3 q = *map_point(cloak, p);
    return I * 2.0 * kPi * std::exp(I * 2.0 * kPi * q.x());
  };
  double prev = 0.0;
  for (std::size_t n : {128, 256}) {
    const auto A = transported(w, cloak, square(n), 0.1);
    const double err = scalar_error(covariant_divergence(A, jacobians_for(cloak, A), 1.0), expected);
    if (prev > 0.0) CHECK(std::log2(prev / err) == doctest::Approx(2.0).epsilon(0.1));
    prev = err;
  }
}

TEST_CASE("cartesian curl examples") {
  const double k = 2.0;
  const Grid g = square(64);
  ComplexVectorField A(g, 1.0, FieldRole::A);
  for (std::size_t n = 0; n < g.size(); ++n) A.values[n] = Vec3c(0, std::exp(I * k * g.point(n).x()), 0);
  auto expected = [&](const Point3& p) { return Vec3c(0, 0, I * k * std::exp(I * k * p.x())); };
  const double e1 = vector_error(discrete_curl(A), expected);

  const Grid g2 = square(128);
  ComplexVectorField A2(g2, 1.0, FieldRole::A);
  for (std::size_t n = 0; n < g2.size(); ++n) A2.values[n] = Vec3c(0, std::exp(I * k * g2.point(n).x()), 0);
  const double e2 = vector_error(discrete_curl(A2), expected);
  CHECK(std::log2(e1 / e2) == doctest::Approx(2.0).epsilon(0.1));

  ComplexVectorField c(g, 1.0, FieldRole::A);
  for (auto& v : c.values) v = Vec3c(complex(1, 2), -3.0, 0.5);
  const auto cc = discrete_curl(c);
  for (std::size_t n = 0; n < g.size(); ++n) {
    if (!cc.mask[n]) CHECK(cc.values[n].norm() == 0.0);
  }
}

TEST_CASE("boundary ring is masked") {
  const Grid g = square(16);
  ComplexVectorField A(g, 1.0, FieldRole::A);
  const auto c = discrete_curl(A);
  CHECK((c.mask[g.index(0, 5, 0)] & mask::kStencil) != 0);
  CHECK((c.mask[g.index(15, 5, 0)] & mask::kStencil) != 0);
  CHECK(c.mask[g.index(5, 5, 0)] == 0);
}

TEST_CASE("two-path curl through the cloak") {
  const auto w = plane_wave({2 * kPi, 0, 0}, Vec3(0, std::sqrt(0.5), std::sqrt(0.5)).cast<complex>(), 1.0, 1.0, 1.0);
  const auto cloak = CoordinateMap::cylindrical_cloak(0.5, 1.0);
  // sign / sqrt(gamma) turns the coordinate curl into det J times it, so the
  // covariant curl equals J B'(x').
  auto expected = [&](const Point3& p) {
    const Point3 q = *map_point(cloak, p);
    return Vec3c(jacobian(cloak, p).J.cast<complex>() * w.curl_at(q));
  };
  double prev = 0.0;
  for (std::size_t n : {128, 256}) {
    const auto A = transported(w, cloak, square(n), 0.1);
    const double err = vector_error(covariant_curl(A, jacobians_for(cloak, A)), expected);
    if (prev > 0.0) CHECK(std::log2(prev / err) == doctest::Approx(2.0).epsilon(0.1));
    prev = err;
  }
}

TEST_CASE("maxwell residual in a uniform medium is second order") {
  const double epsPrime = 2.25;
  const auto w = plane_wave({kPi, 2 * kPi, 0}, Vec3(0, 0, 1).cast<complex>(), 1.0, epsPrime, 1.0);
  const auto id = CoordinateMap::identity();
  double prev = 0.0;
  for (std::size_t n : {64, 128, 256}) {
    const auto A = transported(w, id, square(n), 0);
    const auto r = maxwell_residual(A, MediumField::uniform(A.grid, epsPrime, 1.0), w.omega);
    if (prev > 0.0) CHECK(std::log2(prev / r.relative) == doctest::Approx(2.0).epsilon(0.1));
    prev = r.relative;
  }
}

TEST_CASE("detuned frequency leaves an h-independent residual") {
  const auto w = plane_wave({2 * kPi, 0, 0}, Vec3(0, 1, 0).cast<complex>(), 1.0, 1.0, 1.0);
  const auto cloak = CoordinateMap::cylindrical_cloak(0.5, 1.0);
  std::vector<double> values;
  for (std::size_t n : {128, 256}) {
    const auto A = transported(w, cloak, square(n), 0.1);
    MediumField medium = sample_medium(cloak, A.grid, 1.0, 1.0);
    for (std::size_t i = 0; i < A.grid.size(); ++i) medium.mask[i] |= A.mask[i];
    const auto tuned = maxwell_residual(A, medium, w.omega);
    const auto detuned = maxwell_residual(A, medium, 1.1 * w.omega);
    CHECK(tuned.relative < 0.03);
    CHECK(detuned.relative > 0.1);
    values.push_back(detuned.relative);
  }
  CHECK(values[1] == doctest::Approx(values[0]).epsilon(0.05));
}

TEST_CASE("maxwell residual guards") {
  const Grid g = square(16);
  ComplexVectorField A(g, 1.0, FieldRole::A);
  MediumField m = MediumField::uniform(g, 1.0, 1.0);
  m.mu[g.index(8, 8, 0)] = Mat3::Zero();
  CHECK_THROWS_AS(maxwell_residual(A, m, 1.0), SingularTensor);
  m.mask[g.index(8, 8, 0)] = mask::kExcluded;
  CHECK_NOTHROW(maxwell_residual(A, m, 1.0));
  CHECK_THROWS_AS(maxwell_residual(A, MediumField::uniform(square(17), 1.0, 1.0), 1.0), GridMismatch);
}
