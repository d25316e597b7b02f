#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "kinv/optim.hpp"

namespace kinv::harness {

/// Experiment description. The text form is one `key = value` per line with
/// keys equal to the field names below; lists are comma separated.
struct ExperimentConfig {
  std::string dataset_source = "synthetic";  // synthetic | idx | cifar10
  std::string dataset_path;                  // idx images, or comma-separated cifar10 batches
  std::string dataset_labels_path;           // optional idx labels (count cross-check only)
  std::size_t synthetic_n = 4096;
  std::size_t synthetic_d = 256;
  double synthetic_zero_fraction = 0.5;

  std::vector<std::size_t> widths = {256, 256, 256, 256, 256};
  optim::Hyperparams hyper{};

  std::size_t batch_size = 64;
  std::size_t total_iterations = 3000;
  std::vector<std::size_t> snapshot_iterations = {0, 300, 1000, 3000};
  std::size_t theta_grid = 17;
  std::size_t n_pairs = 64;
  bool zero_sum = true;
  std::vector<std::size_t> probed_layers = {1, 2, 3, 4};
  std::uint64_t seed = 1;

  /// Throws ConfigError on any violated invariant.
  void validate() const;
  /// Canonical text form; parse(to_text(c)) == c.
  std::string to_text() const;
  /// FNV-1a 64 of to_text().
  std::uint64_t hash() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&);
};

ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

enum class SweepParam { kEpsilon, kAlpha };

std::string_view to_string(SweepParam p);
SweepParam parse_sweep_param(std::string_view name);

struct SweepSpec {
  ExperimentConfig base;
  SweepParam param = SweepParam::kEpsilon;
  std::vector<double> values;
  // 0 means base.total_iterations.
  std::size_t measurement_iteration = 0;

  void validate() const;
  std::size_t measure_at() const {
    return measurement_iteration == 0 ? base.total_iterations : measurement_iteration;
  }
};

/// Parses "a,b,c" into numbers. Throws ConfigError on malformed entries.
std::vector<double> parse_double_list(std::string_view text);
std::vector<std::size_t> parse_size_list(std::string_view text);

}  // namespace kinv::harness
