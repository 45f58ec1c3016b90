#include "covrank/pgm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

#include "covrank/error.hpp"

namespace covrank {

GrayImage normalize_map(const NdArray& map) {
  if (map.rank() != 2) fail(ErrorKind::data, "feature map must be 2-D, got " + shape_string(map.shape()));
  GrayImage img;
  img.height = map.dim(0);
  img.width = map.dim(1);
  img.pixels.assign(map.size(), 128);
  if (map.empty()) return img;
  const auto [lo, hi] = std::minmax_element(map.values().begin(), map.values().end());
  const double a = *lo, b = *hi;
  if (!(b > a)) return img;
  for (std::size_t i = 0; i < map.size(); ++i) {
    img.pixels[i] = static_cast<std::uint8_t>(std::lround(255.0 * (map[i] - a) / (b - a)));
  }
  return img;
}

GrayImage matrix_image(const CoverageMatrix& matrix) {
  GrayImage img;
  img.height = matrix.rows;
  img.width = matrix.cols;
  img.pixels.reserve(matrix.rows * matrix.cols);
  for (std::size_t i = 0; i < matrix.rows; ++i) {
    for (std::size_t p = 0; p < matrix.cols; ++p) {
      const int v = matrix.ordered(i, p);
      img.pixels.push_back(v == 0 ? kPixelZero : v == 1 ? kPixelOne : kPixelEe);
    }
  }
  return img;
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& image) {
  if (image.pixels.size() != image.width * image.height) fail(ErrorKind::data, "pgm: pixel count mismatch");
  const std::string header = "P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), image.pixels.begin(), image.pixels.end());
  return out;
}

GrayImage decode_pgm(const std::vector<std::uint8_t>& bytes) {
  std::size_t pos = 0;
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto number = [&]() -> std::size_t {
    skip_space();
    if (pos >= bytes.size() || !std::isdigit(bytes[pos])) fail(ErrorKind::data, "pgm: malformed header");
    std::size_t v = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) v = v * 10 + (bytes[pos++] - '0');
    return v;
  };
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') fail(ErrorKind::data, "pgm: not a P5 image");
  pos = 2;
  GrayImage img;
  img.width = number();
  img.height = number();
  const std::size_t maxval = number();
  if (maxval != 255) fail(ErrorKind::data, "pgm: only maxval 255 is supported");
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) fail(ErrorKind::data, "pgm: malformed header");
  ++pos;
  if (bytes.size() - pos != img.width * img.height) fail(ErrorKind::data, "pgm: pixel data size mismatch");
  img.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end());
  return img;
}

void write_pgm(const std::filesystem::path& path, const GrayImage& image) {
  const auto bytes = encode_pgm(image);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::data, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::data, "cannot read " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_pgm(bytes);
}

}  // namespace covrank
