#include <gtest/gtest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <vector>

#include "kinv/data.hpp"
#include "kinv/error.hpp"
#include "kinv/rng.hpp"

namespace kinv::data {
namespace {

void put_be32(std::vector<unsigned char>& out, std::uint32_t v) {
  out.push_back(static_cast<unsigned char>(v >> 24));
  out.push_back(static_cast<unsigned char>(v >> 16));
  out.push_back(static_cast<unsigned char>(v >> 8));
  out.push_back(static_cast<unsigned char>(v));
}

std::vector<unsigned char> idx_images(std::uint32_t magic, std::uint32_t n, std::uint32_t rows,
                                      std::uint32_t cols, std::size_t payload) {
  std::vector<unsigned char> bytes;
  put_be32(bytes, magic);
  put_be32(bytes, n);
  put_be32(bytes, rows);
  put_be32(bytes, cols);
  for (std::size_t i = 0; i < payload; ++i) {
    bytes.push_back(static_cast<unsigned char>(i % 256));
  }
  return bytes;
}

TEST(Idx, ParsesTenMnistSizedImages) {
  const auto bytes = idx_images(0x00000803, 10, 28, 28, 10 * 784);
  const Dataset ds = parse_idx_images(bytes);
  EXPECT_EQ(ds.size(), 10u);
  EXPECT_EQ(ds.dim(), 784u);
  // Row-major flattening: image 1, pixel 0 is byte 784.
  EXPECT_DOUBLE_EQ(ds.samples(1, 0), static_cast<double>(784 % 256) / 255.0);
}

TEST(Idx, MaxByteScalesToOne) {
  auto bytes = idx_images(0x00000803, 1, 2, 2, 4);
  bytes[16] = 255;
  const Dataset ds = parse_idx_images(bytes);
  EXPECT_EQ(ds.samples(0, 0), 1.0);
}

TEST(Idx, BadMagicIsFormatError) {
  const auto bytes = idx_images(0x12345678, 1, 2, 2, 4);
  EXPECT_THROW(parse_idx_images(bytes), FormatError);
}

TEST(Idx, TruncatedPayloadIsLengthError) {
  const auto bytes = idx_images(0x00000803, 3, 2, 2, 11);
  EXPECT_THROW(parse_idx_images(bytes), LengthError);
}

TEST(Idx, LabelFileCountIsCrossChecked) {
  const auto dir = std::filesystem::temp_directory_path() / "kinv_idx_test";
  std::filesystem::create_directories(dir);
  const auto images = idx_images(0x00000803, 2, 2, 2, 8);
  std::vector<unsigned char> labels;
  put_be32(labels, 0x00000801);
  put_be32(labels, 3);
  labels.insert(labels.end(), {1, 2, 3});
  std::ofstream(dir / "img", std::ios::binary)
      .write(reinterpret_cast<const char*>(images.data()), images.size());
  std::ofstream(dir / "lbl", std::ios::binary)
      .write(reinterpret_cast<const char*>(labels.data()), labels.size());
  EXPECT_THROW(load_idx(dir / "img", dir / "lbl"), LengthError);
  EXPECT_EQ(load_idx(dir / "img").size(), 2u);
}

TEST(Cifar, OneRecord) {
  std::vector<unsigned char> bytes(3073, 0);
  bytes[0] = 7;  // label, discarded
  bytes[1] = 255;
  const Dataset ds = parse_cifar10(bytes);
  EXPECT_EQ(ds.size(), 1u);
  EXPECT_EQ(ds.dim(), 3072u);
  EXPECT_EQ(ds.samples(0, 0), 1.0);
  EXPECT_EQ(ds.samples(0, 1), 0.0);
}

TEST(Cifar, AllZeroPixelsGiveZeroRow) {
  const std::vector<unsigned char> bytes(2 * 3073, 0);
  const Dataset ds = parse_cifar10(bytes);
  for (double v : ds.samples.data()) EXPECT_EQ(v, 0.0);
}

TEST(Cifar, MissingLabelByteIsLengthError) {
  const std::vector<unsigned char> bytes(3072, 0);
  EXPECT_THROW(parse_cifar10(bytes), LengthError);
}

TEST(Synthetic, DeterministicAndInRange) {
  Rng a(17);
  Rng b(17);
  const Dataset x = synthetic(2, 4, a);
  const Dataset y = synthetic(2, 4, b);
  EXPECT_EQ(x.samples, y.samples);
  for (double v : x.samples.data()) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(Synthetic, MeanWithinCltBound) {
  Rng rng(123);
  const Dataset ds = synthetic(1000, 1000, rng);
  double sum = 0.0;
  for (double v : ds.samples.data()) sum += v;
  const double n = static_cast<double>(ds.samples.size());
  // 4σ/√N with σ² = 1/12.
  EXPECT_NEAR(sum / n, 0.5, 4.0 * std::sqrt(1.0 / 12.0) / std::sqrt(n));
  EXPECT_LE(4.0 * std::sqrt(1.0 / 12.0) / std::sqrt(n), 0.002);
}

TEST(Synthetic, ZeroFractionProducesZeros) {
  Rng rng(4);
  const Dataset ds = synthetic(100, 100, rng, 0.5);
  std::size_t zeros = 0;
  for (double v : ds.samples.data()) zeros += v == 0.0;
  EXPECT_NEAR(static_cast<double>(zeros) / 10000.0, 0.5, 0.03);
  EXPECT_NO_THROW(validate(ds));
}

TEST(Synthetic, RejectsSmallDimension) {
  Rng rng(1);
  EXPECT_THROW(synthetic(2, 3, rng), ParameterError);
}

}  // namespace
}  // namespace kinv::data
