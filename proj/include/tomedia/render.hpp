#pragma once

// Grayscale rasters of the real part of a planar scalar field.

#include <cstdint>
#include <string>
#include <vector>

#include "tomedia/fields.hpp"

namespace tomedia {

enum class Palette { Grayscale };

// Row 0 is the top of the image (largest y). Pixel value
// round(127.5 (1 + t)) with t = clamp(Re f / (3 rms), -1, 1); masked pixels
// and an all-zero field map to 128.
struct Raster {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;
};

// The field must live on a grid with a single z layer.
Raster make_raster(const ComplexScalarField& field, Palette palette = Palette::Grayscale);

// Binary PGM (P5) bytes.
std::string to_pgm(const Raster& raster);

// Writes `outPath` (PGM) and the same path with extension .csv (the field
// dump). Returns the number of bytes written across both files.
std::size_t render_raster(const ComplexScalarField& field, Palette palette,
                          const std::string& outPath);

}  // namespace tomedia
