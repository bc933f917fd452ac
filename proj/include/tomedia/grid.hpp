#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "tomedia/types.hpp"

namespace tomedia {

// Uniform Cartesian grid of sample points, x index fastest. An axis with a
// single point is treated as invariant (no derivative along it).
class Grid {
 public:
  static constexpr std::size_t kDefaultPointCap = 16'000'000;

  Grid() = default;
  Grid(Point3 origin, std::array<double, 3> spacing, std::array<std::size_t, 3> counts,
       std::size_t pointCap = kDefaultPointCap);

  // Node-aligned grid spanning [lo, hi]; single-point axes sit at lo.
  static Grid from_bounds(const Point3& lo, const Point3& hi, std::array<std::size_t, 3> counts,
                          std::size_t pointCap = kDefaultPointCap);
  // Cell-centred grid over the box [lo, hi): point i sits at lo + (i + 1/2) h.
  static Grid cell_centred(const Point3& lo, const Point3& hi, std::array<std::size_t, 3> counts,
                           std::size_t pointCap = kDefaultPointCap);

  const Point3& origin() const { return origin_; }
  const std::array<double, 3>& spacing() const { return spacing_; }
  const std::array<std::size_t, 3>& counts() const { return counts_; }
  std::size_t count(int axis) const { return counts_[static_cast<std::size_t>(axis)]; }
  double h(int axis) const { return spacing_[static_cast<std::size_t>(axis)]; }

  std::size_t size() const { return counts_[0] * counts_[1] * counts_[2]; }
  bool active(int axis) const { return count(axis) > 1; }

  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const {
    return i + counts_[0] * (j + counts_[1] * k);
  }
  std::array<std::size_t, 3> coords(std::size_t idx) const;
  Point3 point(std::size_t i, std::size_t j, std::size_t k) const;
  Point3 point(std::size_t idx) const;

  // Volume (or area, or length) element of one sample: product of spacings
  // along active axes.
  double cell_volume() const;

  bool operator==(const Grid& other) const;
  bool operator!=(const Grid& other) const { return !(*this == other); }

 private:
  Point3 origin_ = Point3::Zero();
  std::array<double, 3> spacing_{1.0, 1.0, 1.0};
  std::array<std::size_t, 3> counts_{1, 1, 1};
};

// Mask bits attached to sampled fields. Any non-zero mask excludes the point.
namespace mask {
inline constexpr std::uint8_t kUndefined = 1;  // no image under the map
inline constexpr std::uint8_t kSingular = 2;   // source point or singular shell
inline constexpr std::uint8_t kInterface = 4;  // on a map kink
inline constexpr std::uint8_t kStencil = 8;    // stencil leaves the valid region
inline constexpr std::uint8_t kExcluded = 16;  // removed by the caller
}  // namespace mask

using Mask = std::vector<std::uint8_t>;

}  // namespace tomedia
