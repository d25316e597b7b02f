#include "kinv/data.hpp"

#include <cstdint>
#include <fstream>
#include <iterator>

#include "kinv/error.hpp"
#include "kinv/rng.hpp"

namespace kinv::data {

namespace {

constexpr std::uint32_t kIdxImageMagic = 0x00000803;
constexpr std::uint32_t kIdxLabelMagic = 0x00000801;
constexpr std::size_t kCifarPixels = 3072;
constexpr std::size_t kCifarRecord = kCifarPixels + 1;

std::uint32_t read_be32(std::span<const unsigned char> bytes, std::size_t offset) {
  if (offset + 4 > bytes.size()) {
    throw LengthError("IDX: header truncated");
  }
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

}  // namespace

void validate(const Dataset& ds) {
  if (ds.size() < 1) {
    throw ParameterError("dataset '" + ds.name + "' has no samples");
  }
  if (ds.dim() < 4) {
    throw ParameterError("dataset '" + ds.name + "' has dimension " + std::to_string(ds.dim()) +
                         " < 4");
  }
  for (double v : ds.samples.data()) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ParameterError("dataset '" + ds.name + "' has an entry outside [0, 1]");
    }
  }
}

std::vector<unsigned char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw FormatError("cannot open " + path.string());
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Dataset parse_idx_images(std::span<const unsigned char> bytes, std::string name) {
  const std::uint32_t magic = read_be32(bytes, 0);
  if (magic != kIdxImageMagic) {
    throw FormatError("IDX: bad image magic " + std::to_string(magic) + " (expected 0x00000803)");
  }
  const std::size_t count = read_be32(bytes, 4);
  const std::size_t rows = read_be32(bytes, 8);
  const std::size_t cols = read_be32(bytes, 12);
  const std::size_t d = rows * cols;
  constexpr std::size_t header = 16;
  if (bytes.size() < header + count * d) {
    throw LengthError("IDX: payload has " + std::to_string(bytes.size() - header) +
                      " bytes, expected " + std::to_string(count * d));
  }
  Matrix samples(count, d);
  auto out = samples.data();
  for (std::size_t i = 0; i < count * d; ++i) {
    out[i] = static_cast<double>(bytes[header + i]) / 255.0;
  }
  Dataset ds{std::move(name), std::move(samples)};
  validate(ds);
  return ds;
}

std::size_t parse_idx_label_count(std::span<const unsigned char> bytes) {
  const std::uint32_t magic = read_be32(bytes, 0);
  if (magic != kIdxLabelMagic) {
    throw FormatError("IDX: bad label magic " + std::to_string(magic) + " (expected 0x00000801)");
  }
  const std::size_t count = read_be32(bytes, 4);
  if (bytes.size() < 8 + count) {
    throw LengthError("IDX: label payload truncated");
  }
  return count;
}

Dataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels) {
  const auto bytes = read_file(images);
  Dataset ds = parse_idx_images(bytes, images.filename().string());
  if (!labels.empty()) {
    const std::size_t n = parse_idx_label_count(read_file(labels));
    if (n != ds.size()) {
      throw LengthError("IDX: " + std::to_string(n) + " labels for " + std::to_string(ds.size()) +
                        " images");
    }
  }
  return ds;
}

Dataset parse_cifar10(std::span<const unsigned char> bytes, std::string name) {
  if (bytes.empty() || bytes.size() % kCifarRecord != 0) {
    throw LengthError("CIFAR-10: byte count " + std::to_string(bytes.size()) +
                      " is not a positive multiple of 3073");
  }
  const std::size_t count = bytes.size() / kCifarRecord;
  Matrix samples(count, kCifarPixels);
  for (std::size_t r = 0; r < count; ++r) {
    const unsigned char* pixels = bytes.data() + r * kCifarRecord + 1;
    auto row = samples.row(r);
    for (std::size_t i = 0; i < kCifarPixels; ++i) {
      row[i] = static_cast<double>(pixels[i]) / 255.0;
    }
  }
  Dataset ds{std::move(name), std::move(samples)};
  validate(ds);
  return ds;
}

Dataset load_cifar10(const std::vector<std::filesystem::path>& batches) {
  if (batches.empty()) {
    throw ParameterError("load_cifar10: no batch files given");
  }
  std::vector<unsigned char> all;
  for (const auto& path : batches) {
    auto bytes = read_file(path);
    if (bytes.size() % kCifarRecord != 0) {
      throw LengthError("CIFAR-10: " + path.string() + " is not a multiple of 3073 bytes");
    }
    all.insert(all.end(), bytes.begin(), bytes.end());
  }
  return parse_cifar10(all, "cifar10");
}

Dataset synthetic(std::size_t n, std::size_t d, Rng& rng, double zero_fraction) {
  if (n < 1) {
    throw ParameterError("synthetic: n must be >= 1");
  }
  if (d < 4) {
    throw ParameterError("synthetic: d must be >= 4, got " + std::to_string(d));
  }
  if (!(zero_fraction >= 0.0 && zero_fraction < 1.0)) {
    throw ParameterError("synthetic: zero_fraction must lie in [0, 1)");
  }
  Matrix samples(n, d);
  for (double& v : samples.data()) {
    v = rng.uniform();
    if (zero_fraction > 0.0 && rng.uniform() < zero_fraction) {
      v = 0.0;
    }
  }
  return Dataset{"synthetic", std::move(samples)};
}

}  // namespace kinv::data
