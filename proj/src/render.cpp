#include "tomedia/render.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>
#include <stdexcept>

#include "tomedia/io.hpp"

namespace tomedia {

Raster make_raster(const ComplexScalarField& field, Palette) {
  const Grid& g = field.grid;
  if (g.count(2) != 1) throw std::invalid_argument("make_raster: field must be planar");
  const bool masked = !field.mask.empty();

  double sum2 = 0.0;
  std::size_t n = 0;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    if (masked && field.mask[idx]) continue;
    const double v = field.values[idx].real();
    if (!std::isfinite(v)) throw std::invalid_argument("make_raster: non-finite value at an unmasked point");
    sum2 += v * v;
    ++n;
  }
  const double rms = n > 0 ? std::sqrt(sum2 / static_cast<double>(n)) : 0.0;

  Raster r;
  r.width = g.count(0);
  r.height = g.count(1);
  r.pixels.assign(r.width * r.height, 128);
  if (rms == 0.0) return r;
  for (std::size_t j = 0; j < r.height; ++j) {
    for (std::size_t i = 0; i < r.width; ++i) {
      const std::size_t idx = g.index(i, j, 0);
      if (masked && field.mask[idx]) continue;
      const double t = std::clamp(field.values[idx].real() / (3.0 * rms), -1.0, 1.0);
      r.pixels[(r.height - 1 - j) * r.width + i] =
          static_cast<std::uint8_t>(std::lround(127.5 * (1.0 + t)));
    }
  }
  return r;
}

std::string to_pgm(const Raster& raster) {
  std::string out = "P5\n" + std::to_string(raster.width) + " " + std::to_string(raster.height) + "\n255\n";
  out.append(raster.pixels.begin(), raster.pixels.end());
  return out;
}

std::size_t render_raster(const ComplexScalarField& field, Palette palette,
                          const std::string& outPath) {
  const std::string pgm = to_pgm(make_raster(field, palette));
  std::ostringstream csv;
  write_scalar_csv(csv, field);
  const std::string csvText = csv.str();
  write_file(outPath, pgm);
  write_file(std::filesystem::path(outPath).replace_extension(".csv").string(), csvText);
  return pgm.size() + csvText.size();
}

}  // namespace tomedia
