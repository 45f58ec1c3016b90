#pragma once

// Binary PGM (P5, maxval 255) images for feature maps and coverage matrices.

#include <cstdint>
#include <filesystem>
#include <vector>

#include "covrank/dataset.hpp"
#include "covrank/ndarray.hpp"

namespace covrank {

struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;  // row-major

  bool operator==(const GrayImage&) const = default;
};

/// Min-max normalization of a 2-D array to [0, 255]; a constant map is all 128.
GrayImage normalize_map(const NdArray& map);

inline constexpr std::uint8_t kPixelZero = 255;
inline constexpr std::uint8_t kPixelOne = 64;
inline constexpr std::uint8_t kPixelEe = 0;

/// Matrix in display order: 0 white, 1 dark gray, -1 black.
GrayImage matrix_image(const CoverageMatrix& matrix);

std::vector<std::uint8_t> encode_pgm(const GrayImage& image);
/// Throws Error(data) on a malformed header or short pixel data.
GrayImage decode_pgm(const std::vector<std::uint8_t>& bytes);

void write_pgm(const std::filesystem::path& path, const GrayImage& image);
GrayImage read_pgm(const std::filesystem::path& path);

}  // namespace covrank
