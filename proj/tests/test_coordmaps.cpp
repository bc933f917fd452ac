#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include <Eigen/LU>

#include "test_util.hpp"
#include "tomedia/coordmaps.hpp"
#include "tomedia/errors.hpp"

using namespace tomedia;
using testutil::max_abs;

namespace {

bool near(const Point3& a, const Point3& b, double tol) { return (a - b).cwiseAbs().maxCoeff() <= tol; }

// Cloak Jacobian written out in polar form: radial stretch (R2-R1)/R2,
// azimuthal stretch r/r'.
Mat3 cloak_jacobian_oracle(double R1, double R2, const Point3& p) {
  const double r = std::hypot(p.x(), p.y());
  const double rp = (r - R1) * R2 / (R2 - R1);
  const double c = p.x() / r, s = p.y() / r;
  Mat3 rot;
  rot << c, -s, 0, s, c, 0, 0, 0, 1;
  const Mat3 diag = Eigen::Vector3d((R2 - R1) / R2, r / rp, 1.0).asDiagonal();
  return rot * diag * rot.transpose();
}

}  // namespace

TEST_CASE("map_point examples") {
  const auto lens = CoordinateMap::lens_slab(1.0);
  CHECK(near(*map_point(lens, {1.5, 0, 0}), {-0.5, 0, 0}, 1e-15));
  CHECK(near(*map_point(lens, {0.5, 0.2, 0}), {-0.5, 0.2, 0}, 1e-15));
  CHECK(near(*map_point(lens, {-0.7, 0, 3}), {-0.7, 0, 3}, 0.0));

  CHECK(near(*map_point(CoordinateMap::identity(), {0.3, -2, 7}), {0.3, -2, 7}, 0.0));

  const auto cloak = CoordinateMap::cylindrical_cloak(0.5, 1.0);
  CHECK(near(*map_point(cloak, {0.75, 0, 0}), {0.5, 0, 0}, 1e-15));
  CHECK_FALSE(map_point(cloak, {0.25, 0, 0}).has_value());
  CHECK(near(*map_point(cloak, {0, 2, 1}), {0, 2, 1}, 0.0));
}

TEST_CASE("cloak axis selection") {
  const auto cx = CoordinateMap::cylindrical_cloak(0.5, 1.0, Axis::X);
  const auto img = map_point(cx, {5.0, 0.0, 0.75});
  REQUIRE(img);
  CHECK(near(*img, {5.0, 0.0, 0.5}, 1e-15));
  CHECK_FALSE(map_point(cx, {3.0, 0.1, 0.1}).has_value());
  CHECK_FALSE(cx.z_invariant());
  CHECK(CoordinateMap::cylindrical_cloak(0.5, 1.0).z_invariant());
}

TEST_CASE("preimages examples") {
  const auto lens = CoordinateMap::lens_slab(1.0);
  auto pre = preimages(lens, {-0.5, 0, 0});
  REQUIRE(pre.size() == 3);
  CHECK(near(pre[0], {-0.5, 0, 0}, 1e-15));
  CHECK(near(pre[1], {0.5, 0, 0}, 1e-15));
  CHECK(near(pre[2], {1.5, 0, 0}, 1e-15));

  pre = preimages(lens, {-3, 0, 0});
  REQUIRE(pre.size() == 1);
  CHECK(near(pre[0], {-3, 0, 0}, 0.0));

  pre = preimages(CoordinateMap::cylindrical_cloak(0.5, 1.0), {2, 0, 0});
  REQUIRE(pre.size() == 1);
  CHECK(near(pre[0], {2, 0, 0}, 0.0));
}

TEST_CASE("preimages invert map_point on random points") {
  std::mt19937_64 rng(7);
  const std::vector<CoordinateMap> maps{
      CoordinateMap::lens_slab(1.0), CoordinateMap::cylindrical_cloak(0.5, 1.0),
      CoordinateMap::radial_polynomial({1.0, 0.3, 0.05}),
      CoordinateMap::compose(CoordinateMap::cylindrical_cloak(0.5, 1.0),
                             CoordinateMap::lens_slab(0.4))};
  for (const auto& map : maps) {
    for (int n = 0; n < 1000; ++n) {
      const Point3 p = testutil::random_point(rng, 2.5);
      const auto img = map_point(map, p);
      if (!img) continue;
      bool found = false;
      for (const auto& q : preimages(map, *img)) found = found || near(q, p, 1e-12);
      CHECK(found);
    }
  }
}

TEST_CASE("jacobian examples") {
  const auto lens = CoordinateMap::lens_slab(1.0);
  const auto jl = jacobian(lens, {0.5, 0, 0});
  CHECK(max_abs(jl.J - Mat3(Eigen::Vector3d(-1, 1, 1).asDiagonal())) == 0.0);
  CHECK(jl.detJ == doctest::Approx(-1.0));
  CHECK(jl.sign == -1);

  const auto ji = jacobian(CoordinateMap::identity(), {4, -1, 2});
  CHECK(max_abs(ji.J - Mat3::Identity()) == 0.0);
  CHECK(max_abs(ji.gammaUpper - Mat3::Identity()) == 0.0);
  CHECK(ji.gamma == 1.0);

  const auto jc = jacobian(CoordinateMap::cylindrical_cloak(0.5, 1.0), {0.75, 0, 0});
  CHECK(max_abs(jc.J - Mat3(Eigen::Vector3d(0.5, 1.5, 1.0).asDiagonal())) < 1e-15);
}

TEST_CASE("cloak jacobian matches the polar oracle") {
  std::mt19937_64 rng(11);
  const auto cloak = CoordinateMap::cylindrical_cloak(0.5, 1.0);
  int tested = 0;
  while (tested < 1000) {
    const Point3 p = testutil::random_point(rng, 1.0);
    const double r = std::hypot(p.x(), p.y());
    if (r < 0.51 || r > 0.99) continue;
    CHECK(max_abs(jacobian(cloak, p).J - cloak_jacobian_oracle(0.5, 1.0, p)) < 1e-12);
    ++tested;
  }
}

TEST_CASE("jacobian errors") {
  const auto cloak = CoordinateMap::cylindrical_cloak(0.5, 1.0);
  CHECK_THROWS_AS(jacobian(cloak, {0.2, 0, 0}), UndefinedImage);
  CHECK_THROWS_AS(jacobian(cloak, {1.0, 0, 0}), InterfaceError);
  CHECK_THROWS_AS(jacobian(cloak, {0.0, 0.5, 0}), InterfaceError);
  const auto lens = CoordinateMap::lens_slab(1.0);
  CHECK_THROWS_AS(jacobian(lens, {0.0, 0.3, 0}), InterfaceError);
  CHECK_THROWS_AS(jacobian(lens, {1.0, 0.3, 0}), InterfaceError);
  CHECK_THROWS_AS(jacobian(CoordinateMap::radial_polynomial({1.0, 1.0}), {0, 0, 0}), InterfaceError);
}

TEST_CASE("invalid map parameters are rejected") {
  CHECK_THROWS_AS(CoordinateMap::cylindrical_cloak(1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(CoordinateMap::cylindrical_cloak(-0.1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(CoordinateMap::lens_slab(0.0), std::invalid_argument);
  CHECK_THROWS_AS(CoordinateMap::radial_polynomial({}), std::invalid_argument);
  CHECK_THROWS_AS(CoordinateMap::radial_polynomial({0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(CoordinateMap::radial_polynomial({1.0, -0.5}), std::invalid_argument);
}

TEST_CASE("jacobian_fd examples") {
  const auto fi = jacobian_fd(CoordinateMap::identity(), {1, 2, 3}, 1e-3);
  REQUIRE(fi);
  CHECK(max_abs(fi->J - Mat3::Identity()) < 1e-9);

  const auto fl = jacobian_fd(CoordinateMap::lens_slab(1.0), {0.5, 0, 0}, 1e-4);
  REQUIRE(fl);
  CHECK(max_abs(fl->J - Mat3(Eigen::Vector3d(-1, 1, 1).asDiagonal())) < 1e-10);

  const auto cloak = CoordinateMap::cylindrical_cloak(0.5, 1.0);
  const Point3 p{0.75, 0.1, 0};
  const Mat3 exact = jacobian(cloak, p).J;
  const double e1 = max_abs(jacobian_fd(cloak, p, 1e-2)->J - exact);
  const double e2 = max_abs(jacobian_fd(cloak, p, 5e-3)->J - exact);
  CHECK(std::log2(e1 / e2) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("jacobian_fd refuses stencils that leave the branch") {
  const auto lens = CoordinateMap::lens_slab(1.0);
  CHECK_FALSE(jacobian_fd(lens, {0.995, 0, 0}, 1e-2).has_value());
  CHECK(jacobian_fd(lens, {0.98, 0, 0}, 1e-2).has_value());
}

TEST_CASE("metric invariants on random points") {
  std::mt19937_64 rng(3);
  const std::vector<CoordinateMap> maps{
      CoordinateMap::identity(), CoordinateMap::lens_slab(1.0),
      CoordinateMap::cylindrical_cloak(0.5, 1.0), CoordinateMap::radial_polynomial({0.8, 0.4, 0.1})};
  for (const auto& map : maps) {
    for (int n = 0; n < 1000; ++n) {
      const Point3 p = testutil::smooth_point(rng, map, 2.0, 1e-3);
      const auto jd = jacobian(map, p);
      CHECK(max_abs(jd.J * jd.Jinv - Mat3::Identity()) < 1e-12);
      CHECK(max_abs(jd.gammaUpper - jd.J * jd.J.transpose()) < 1e-12 * (1 + max_abs(jd.gammaUpper)));
      CHECK(max_abs(jd.gammaUpper * jd.gammaLower - Mat3::Identity()) < 1e-10);
      CHECK(jd.gamma == doctest::Approx(1.0 / (jd.detJ * jd.detJ)).epsilon(1e-12));
      CHECK(jd.sign == (jd.detJ > 0 ? 1 : -1));
      CHECK(jd.detJ == doctest::Approx(jd.J.determinant()).epsilon(1e-12));
    }
  }
}

TEST_CASE("composite jacobian obeys the chain rule") {
  std::mt19937_64 rng(5);
  const auto first = CoordinateMap::radial_polynomial({1.0, 0.2});
  const auto second = CoordinateMap::lens_slab(0.7);
  const auto comp = CoordinateMap::compose(first, second);
  for (int n = 0; n < 1000; ++n) {
    const Point3 p = testutil::smooth_point(rng, comp, 2.0, 1e-3);
    const Point3 mid = *map_point(first, p);
    const Mat3 chain = jacobian(first, p).J * jacobian(second, mid).J;
    CHECK(max_abs(jacobian(comp, p).J - chain) < 1e-12 * (1 + max_abs(chain)));
    CHECK(near(*map_point(comp, p), *map_point(second, mid), 0.0));
  }
}

TEST_CASE("maps are continuous across their kinks") {
  const auto cloak = CoordinateMap::cylindrical_cloak(0.5, 1.0);
  const double d = 1e-10;
  for (double phi = 0.0; phi < 6.28; phi += 0.37) {
    const Point3 in{(1.0 - d) * std::cos(phi), (1.0 - d) * std::sin(phi), 0};
    const Point3 out{(1.0 + d) * std::cos(phi), (1.0 + d) * std::sin(phi), 0};
    CHECK(near(*map_point(cloak, in), *map_point(cloak, out), 1e-9));
    const Point3 rim{(0.5 + d) * std::cos(phi), (0.5 + d) * std::sin(phi), 0};
    CHECK(map_point(cloak, rim)->norm() < 1e-9);
  }
  const auto lens = CoordinateMap::lens_slab(1.0);
  for (double x : {0.0, 1.0})
    CHECK(near(*map_point(lens, {x - 1e-12, 0.3, 0}), *map_point(lens, {x + 1e-12, 0.3, 0}), 1e-11));
}

TEST_CASE("interface_distance") {
  const auto cloak = CoordinateMap::cylindrical_cloak(0.5, 1.0);
  CHECK(interface_distance(cloak, {0.7, 0, 0}) == doctest::Approx(0.2));
  CHECK(interface_distance(cloak, {0, 3, 5}) == doctest::Approx(2.0));
  CHECK(interface_distance(CoordinateMap::lens_slab(1.0), {0.9, 0, 0}) == doctest::Approx(0.1));
  CHECK(std::isinf(interface_distance(CoordinateMap::identity(), {0, 0, 0})));
}
