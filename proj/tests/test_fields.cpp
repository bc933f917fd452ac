#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Geometry>

#include "test_util.hpp"
#include "tomedia/errors.hpp"
#include "tomedia/fields.hpp"

using namespace tomedia;

namespace {

const complex I{0.0, 1.0};

Grid planar_grid(double L, std::size_t n) {
  return Grid::from_bounds({-L, -L, 0}, {L, L, 0}, {n, n, 1});
}

}  // namespace

TEST_CASE("plane_wave dispersion examples") {
  CHECK(plane_wave({1, 0, 0}, {0, 1, 0}, 1.0, 1.0, 1.0).omega == doctest::Approx(1.0));
  CHECK(plane_wave({2, 0, 0}, {0, 1, 0}, 1.0, 4.0, 1.0).omega == doctest::Approx(1.0));
  CHECK_THROWS_AS(plane_wave({1, 0, 0}, {1, 0, 0}, 1.0, 1.0, 1.0), NonTransversePolarization);
  CHECK_THROWS_AS(plane_wave({0, 0, 0}, {1, 0, 0}, 1.0, 1.0, 1.0), std::invalid_argument);

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.2, 5.0);
  for (int n = 0; n < 1000; ++n) {
    const Vec3 k = testutil::random_point(rng, 3.0);
    const Vec3 pol = k.unitOrthogonal();
    const double ep = u(rng), mp = u(rng);
    const auto w = plane_wave(k, pol.cast<complex>(), 1.0, ep, mp);
    CHECK(w.omega * std::sqrt(ep * mp) == doctest::Approx(k.norm()).epsilon(1e-14));
  }
}

TEST_CASE("plane_wave values and curl") {
  const auto w = plane_wave({0, 0, 2}, {1, 0, 0}, complex(0, 2), 1.0, 1.0);
  const Point3 p{0.3, -0.1, 0.25};
  const complex phase = std::exp(I * 0.5);
  CHECK(std::abs(w.at(p)[0] - complex(0, 2) * phase) < 1e-15);
  // curl of x-hat f(z) is y-hat f'(z)
  CHECK(std::abs(w.curl_at(p)[1] - 2.0 * I * complex(0, 2) * phase) < 1e-14);
  CHECK(std::abs(w.curl_at(p)[0]) < 1e-15);
}

TEST_CASE("spherical wave examples") {
  const Point3 src{-1.5, 0, 0};
  const double k = 2 * std::numbers::pi / 0.5;
  const SphericalWave w{src, k};
  CHECK(std::abs(w.at({-0.5, 0, 0})) == doctest::Approx(1.0 / (4 * std::numbers::pi)));
  CHECK(std::abs(w.at({0.5, 0, 0})) / std::abs(w.at({-0.5, 0, 0})) == doctest::Approx(0.5));
  const double R = 0.1;
  const complex ratio = w.at({-1.5 + R + 2 * std::numbers::pi / k, 0, 0}) / w.at({-1.5 + R, 0, 0});
  CHECK(std::arg(ratio) == doctest::Approx(0.0).epsilon(1e-12));

  const Grid g = planar_grid(2.0, 41);
  const auto f = spherical_wave_scalar(src, k, g);
  int singular = 0;
  for (std::size_t n = 0; n < g.size(); ++n) {
    if (f.mask[n] & mask::kSingular) {
      ++singular;
      CHECK(f.values[n] == complex{});
      CHECK((g.point(n) - src).norm() < 1e-12);
    } else {
      CHECK(std::isfinite(std::abs(f.values[n])));
    }
  }
  CHECK(singular == 1);
  CHECK_THROWS_AS(spherical_wave_scalar(src, 0.0, g), std::invalid_argument);
}

TEST_CASE("transport under the identity map is bitwise") {
  const auto w = plane_wave({1, 2, 0}, Vec3(2, -1, 0).cast<complex>(), 1.0, 1.0, 1.0);
  const Grid g = planar_grid(1.0, 17);
  const auto f = transform_potential([&](const Point3& p) { return w.at(p); }, w.omega,
                                     CoordinateMap::identity(), g, Direction::ToPhysical);
  for (std::size_t n = 0; n < g.size(); ++n) CHECK(f.values[n] == w.at(g.point(n)));
}

TEST_CASE("lens transport example") {
  const double k = 3.0;
  const auto w = plane_wave({k, 0, 0}, {0, 1, 0}, 1.0, 1.0, 1.0);
  const Grid g(Point3(0.5, 0, 0), {1, 1, 1}, {1, 1, 1});
  const auto f = transform_potential([&](const Point3& p) { return w.at(p); }, w.omega,
                                     CoordinateMap::lens_slab(1.0), g, Direction::ToPhysical);
  CHECK(std::abs(f.values[0][1] - std::exp(-I * k * 0.5)) < 1e-15);
  CHECK(std::abs(f.values[0][0]) == 0.0);
}

TEST_CASE("cloak transport: identity outside R2, zero and masked inside R1") {
  const auto w = plane_wave({0, 5, 1}, Vec3(1, 0, 0).cast<complex>(), 1.0, 1.0, 1.0);
  const auto cloak = CoordinateMap::cylindrical_cloak(0.5, 1.0);
  const Grid g = planar_grid(2.0, 80);
  const auto f = transform_potential([&](const Point3& p) { return w.at(p); }, w.omega, cloak, g,
                                     Direction::ToPhysical);
  for (std::size_t n = 0; n < g.size(); ++n) {
    const Point3 p = g.point(n);
    const double r = std::hypot(p.x(), p.y());
    if (r > 1.0 + 1e-12) {
      CHECK((f.values[n] - w.at(p)).norm() <= 1e-12 * w.at(p).norm());
      CHECK(f.mask[n] == 0);
    } else if (r < 0.5) {
      CHECK(f.values[n].norm() == 0.0);
      CHECK((f.mask[n] & mask::kUndefined) != 0);
    }
    CHECK(f.values[n].allFinite());
  }
}

TEST_CASE("covector transport round trip") {
  std::mt19937_64 rng(9);
  const auto map = CoordinateMap::radial_polynomial({1.0, 0.4});
  const VectorFieldFn physical = [](const Point3& p) {
    return Vec3c(std::exp(I * p.x()), p.y() * p.z(), complex(1.0, p.norm()));
  };
  for (int n = 0; n < 200; ++n) {
    const Point3 p = testutil::smooth_point(rng, map, 2.0, 0.05);
    const Point3 pp = *map_point(map, p);
    const Grid gp(pp, {1, 1, 1}, {1, 1, 1});
    const auto primed = transform_potential(physical, 1.0, map, gp, Direction::ToPrimed);
    const JacobianData jd = jacobian(map, p);
    CHECK((primed.values[0] - jd.J.transpose().cast<complex>() * physical(p)).norm() < 1e-12);
    const Vec3c back = jd.Jinv.transpose().cast<complex>() * primed.values[0];
    CHECK((back - physical(p)).norm() < 1e-11);
  }
}

TEST_CASE("scalar transport is composition") {
  const auto lens = CoordinateMap::lens_slab(1.0);
  const ScalarFieldFn phi = [](const Point3& p) { return complex(p.x(), p.y()); };
  const Grid g = planar_grid(2.0, 9);
  const auto f = transform_scalar(phi, 1.0, lens, g, Direction::ToPhysical);
  for (std::size_t n = 0; n < g.size(); ++n) CHECK(f.values[n] == phi(*map_point(lens, g.point(n))));

  const auto s = transform_scalar(phi, 1.0, lens, g, Direction::ToPhysical, Point3(-0.5, 0, 0), 1e-9);
  int singular = 0;
  for (std::size_t n = 0; n < g.size(); ++n) singular += (s.mask[n] & mask::kSingular) ? 1 : 0;
  // x = -0.5, 0.5, 1.5 at y = 0 all map onto the source
  CHECK(singular == 3);
}

TEST_CASE("transport forwards InterfaceError") {
  const auto w = plane_wave({1, 0, 0}, {0, 1, 0}, 1.0, 1.0, 1.0);
  const Grid g(Point3(1.0, 0, 0), {1, 1, 1}, {1, 1, 1});
  CHECK_THROWS_AS(transform_potential([&](const Point3& p) { return w.at(p); }, 1.0,
                                      CoordinateMap::cylindrical_cloak(0.5, 1.0), g,
                                      Direction::ToPhysical),
                  InterfaceError);
}

TEST_CASE("sampled media and masks") {
  const auto cloak = CoordinateMap::cylindrical_cloak(0.5, 1.0);
  const Grid g = planar_grid(1.5, 31);
  const auto m = sample_medium(cloak, g, 1.0, 1.0);
  for (std::size_t n = 0; n < g.size(); ++n) {
    const Point3 p = g.point(n);
    const double r = std::hypot(p.x(), p.y());
    if (r < 0.5) CHECK(m.mask[n] != 0);
    if (r > 1.0 + 1e-9) CHECK(testutil::max_abs(m.eps[n] - Mat3::Identity()) == 0.0);
    if (!m.mask[n]) CHECK(m.eps[n].allFinite());
  }

  Mask mk(g.size(), 0);
  mask_near_interfaces(mk, g, cloak, 0.1);
  for (std::size_t n = 0; n < g.size(); ++n) {
    const double r = g.point(n).head<2>().norm();
    CHECK(static_cast<bool>(mk[n] & mask::kInterface) == (std::abs(r - 0.5) < 0.1 || std::abs(r - 1.0) < 0.1));
  }
  Mask wrong(3, 0);
  CHECK_THROWS_AS(mask_where(wrong, g, [](const Point3&) { return true; }), GridMismatch);
}

TEST_CASE("grid guards") {
  CHECK_THROWS_AS(Grid(Point3::Zero(), {0.0, 1, 1}, {2, 2, 1}), std::invalid_argument);
  CHECK_THROWS_AS(Grid(Point3::Zero(), {1, 1, 1}, {0, 2, 1}), std::invalid_argument);
  CHECK_THROWS_AS(Grid(Point3::Zero(), {1, 1, 1}, {100, 100, 100}, 1000), std::invalid_argument);
  const Grid c = Grid::cell_centred({0, 0, 0}, {1, 1, 0}, {4, 4, 1});
  CHECK(c.point(0).x() == doctest::Approx(0.125));
  CHECK(c.cell_volume() == doctest::Approx(1.0 / 16));
}
