#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "lila/label_space.hpp"

namespace lila::io {

template <typename T>
struct Raster {
  int rows = 0;
  int cols = 0;
  std::vector<T> values;  // row-major, row 0 at the top

  bool operator==(const Raster&) const = default;
};

using FloatRaster = Raster<float>;
using ByteRaster = Raster<std::uint8_t>;
using RgbRaster = Raster<Rgb>;

/// Little-endian PFM ("Pf", scale -1.0); rows are stored bottom to top as
/// the format requires. Reading also accepts big-endian (positive scale).
std::vector<std::uint8_t> encode_pfm(const FloatRaster& image);
FloatRaster decode_pfm(std::span<const std::uint8_t> bytes);
/// Binary PGM (P5), maxval 255.
std::vector<std::uint8_t> encode_pgm(const ByteRaster& image);
ByteRaster decode_pgm(std::span<const std::uint8_t> bytes);
/// Binary PPM (P6), maxval 255.
std::vector<std::uint8_t> encode_ppm(const RgbRaster& image);
RgbRaster decode_ppm(std::span<const std::uint8_t> bytes);

void write_pfm(const std::filesystem::path& path, const FloatRaster& image);
FloatRaster read_pfm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const ByteRaster& image);
ByteRaster read_pgm(const std::filesystem::path& path);
void write_ppm(const std::filesystem::path& path, const RgbRaster& image);
RgbRaster read_ppm(const std::filesystem::path& path);

/// Label images travel as PGM with one id per pixel.
void write_label_image(const std::filesystem::path& path, const LabelImage& labels);
/// Throws UnknownLabelId if an id is invalid for `set`.
LabelImage read_label_image(const std::filesystem::path& path, LabelSet set);

}  // namespace lila::io
