#include <gtest/gtest.h>

#include <filesystem>
#include <string>

#include "covrank/error.hpp"
#include "covrank/pgm.hpp"

namespace {

using namespace covrank;

TEST(Pgm, EncodeDecodeRoundTrip) {
  GrayImage img{3, 2, {0, 10, 20, 128, 200, 255}};
  const auto bytes = encode_pgm(img);
  const std::string header(bytes.begin(), bytes.begin() + 11);
  EXPECT_EQ(header, "P5\n3 2\n255\n");
  EXPECT_EQ(bytes.size(), 11u + 6u);
  EXPECT_EQ(decode_pgm(bytes), img);
}

TEST(Pgm, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "covrank_pgm_test.pgm";
  GrayImage img{4, 3, std::vector<std::uint8_t>(12)};
  for (std::size_t i = 0; i < 12; ++i) img.pixels[i] = static_cast<std::uint8_t>(i * 20);
  write_pgm(path, img);
  EXPECT_EQ(read_pgm(path), img);
  std::filesystem::remove(path);
}

TEST(Pgm, ToleratesCommentsInHeader) {
  const std::string text = "P5\n# map\n2 1\n255\n";
  std::vector<std::uint8_t> bytes(text.begin(), text.end());
  bytes.push_back(7);
  bytes.push_back(9);
  const auto img = decode_pgm(bytes);
  EXPECT_EQ(img.width, 2u);
  EXPECT_EQ(img.pixels, (std::vector<std::uint8_t>{7, 9}));
}

TEST(Pgm, MalformedInput) {
  const std::string bad = "P2\n1 1\n255\n0";
  EXPECT_THROW(decode_pgm({bad.begin(), bad.end()}), Error);
  const std::string shrt = "P5\n3 3\n255\n\x01\x02";
  EXPECT_THROW(decode_pgm({shrt.begin(), shrt.end()}), Error);
  EXPECT_THROW(read_pgm("/nonexistent/covrank.pgm"), Error);
}

TEST(Pgm, NormalizeMap) {
  NdArray m({2, 2}, std::vector<double>{-1.0, 0.0, 1.0, 3.0});
  const auto img = normalize_map(m);
  EXPECT_EQ(img.width, 2u);
  EXPECT_EQ(img.height, 2u);
  EXPECT_EQ(img.pixels.front(), 0);
  EXPECT_EQ(img.pixels.back(), 255);
  EXPECT_LT(img.pixels[1], img.pixels[2]);
  EXPECT_EQ(normalize_map(NdArray({1, 3}, 0.5)).pixels, std::vector<std::uint8_t>(3, 128));
}

TEST(Pgm, MatrixImageInDisplayOrder) {
  CoverageMatrix mx(2, 3);
  mx.at(0, 0) = 1;
  mx.at(1, 2) = -1;
  mx.col_order = {2, 0, 1};
  const auto img = matrix_image(mx);
  EXPECT_EQ(img.width, 3u);
  EXPECT_EQ(img.height, 2u);
  EXPECT_EQ(img.pixels, (std::vector<std::uint8_t>{kPixelZero, kPixelOne, kPixelZero, kPixelEe, kPixelZero,
                                                   kPixelZero}));
}

}  // namespace
