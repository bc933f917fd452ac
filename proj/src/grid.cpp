#include "tomedia/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace tomedia {

Grid::Grid(Point3 origin, std::array<double, 3> spacing, std::array<std::size_t, 3> counts,
           std::size_t pointCap)
    : origin_(origin), spacing_(spacing), counts_(counts) {
  if (!origin.allFinite()) throw std::invalid_argument("grid origin must be finite");
  std::size_t total = 1;
  for (int a = 0; a < 3; ++a) {
    if (!(spacing_[a] > 0.0) || !std::isfinite(spacing_[a])) {
      throw std::invalid_argument("grid spacing must be positive");
    }
    if (counts_[a] < 1) throw std::invalid_argument("grid counts must be >= 1");
    if (total > pointCap / counts_[a] + 1) {
      throw std::invalid_argument("grid exceeds the point cap of " + std::to_string(pointCap));
    }
    total *= counts_[a];
  }
  if (total > pointCap) {
    throw std::invalid_argument("grid exceeds the point cap of " + std::to_string(pointCap));
  }
}

Grid Grid::from_bounds(const Point3& lo, const Point3& hi, std::array<std::size_t, 3> counts,
                       std::size_t pointCap) {
  std::array<double, 3> h{1.0, 1.0, 1.0};
  for (int a = 0; a < 3; ++a) {
    if (counts[a] > 1) h[a] = (hi[a] - lo[a]) / static_cast<double>(counts[a] - 1);
  }
  return Grid(lo, h, counts, pointCap);
}

Grid Grid::cell_centred(const Point3& lo, const Point3& hi, std::array<std::size_t, 3> counts,
                        std::size_t pointCap) {
  std::array<double, 3> h{1.0, 1.0, 1.0};
  Point3 origin = lo;
  for (int a = 0; a < 3; ++a) {
    if (counts[a] == 0) throw std::invalid_argument("grid counts must be >= 1");
    h[a] = (hi[a] - lo[a]) / static_cast<double>(counts[a]);
    if (counts[a] == 1 && !(h[a] > 0.0)) {
      h[a] = 1.0;
      continue;
    }
    origin[a] = lo[a] + 0.5 * h[a];
  }
  return Grid(origin, h, counts, pointCap);
}

std::array<std::size_t, 3> Grid::coords(std::size_t idx) const {
  const std::size_t i = idx % counts_[0];
  const std::size_t rest = idx / counts_[0];
  return {i, rest % counts_[1], rest / counts_[1]};
}

Point3 Grid::point(std::size_t i, std::size_t j, std::size_t k) const {
  return Point3(origin_.x() + static_cast<double>(i) * spacing_[0],
                origin_.y() + static_cast<double>(j) * spacing_[1],
                origin_.z() + static_cast<double>(k) * spacing_[2]);
}

Point3 Grid::point(std::size_t idx) const {
  const auto c = coords(idx);
  return point(c[0], c[1], c[2]);
}

double Grid::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < 3; ++a) {
    if (active(a)) v *= spacing_[a];
  }
  return v;
}

bool Grid::operator==(const Grid& other) const {
  return origin_ == other.origin_ && spacing_ == other.spacing_ && counts_ == other.counts_;
}

}  // namespace tomedia
