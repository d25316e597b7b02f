#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "kinv/matrix.hpp"

namespace kinv {
class Rng;
}

namespace kinv::data {

/// Samples stored one per row, every entry in [0, 1]. Labels are never kept:
/// the training task is autoencoding, so targets equal inputs.
struct Dataset {
  std::string name;
  Matrix samples;
  double lo = 0.0;
  double hi = 1.0;

  std::size_t size() const noexcept { return samples.rows(); }
  std::size_t dim() const noexcept { return samples.cols(); }
};

/// Checks N >= 1, d >= 4 and the [0, 1] range. Throws ParameterError.
void validate(const Dataset& ds);

/// Parses an IDX image file (magic 0x00000803) from raw bytes. Each image is
/// flattened row-major and scaled by 1/255.
Dataset parse_idx_images(std::span<const unsigned char> bytes, std::string name = "idx");
/// Parses an IDX label file (magic 0x00000801) and returns the label count.
/// Used only to cross-check that an image file and its labels agree.
std::size_t parse_idx_label_count(std::span<const unsigned char> bytes);
Dataset load_idx(const std::filesystem::path& images,
                 const std::filesystem::path& labels = {});

/// Parses concatenated CIFAR-10 binary records (1 label byte + 3072 pixels).
Dataset parse_cifar10(std::span<const unsigned char> bytes, std::string name = "cifar10");
Dataset load_cifar10(const std::vector<std::filesystem::path>& batches);

/// n × d entries drawn IID Uniform[0, 1]. When zero_fraction > 0 each entry is
/// independently replaced by 0 with that probability, which gives probe-pair
/// sampling the zero coordinates it needs (as natural images such as MNIST do).
Dataset synthetic(std::size_t n, std::size_t d, Rng& rng, double zero_fraction = 0.0);

std::vector<unsigned char> read_file(const std::filesystem::path& path);

}  // namespace kinv::data
