#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "kinv/config.hpp"
#include "kinv/data.hpp"
#include "kinv/kernels.hpp"
#include "kinv/mlp.hpp"
#include "kinv/probes.hpp"

namespace kinv::harness {

/// Moment estimates of one layer plus the bound terms evaluated with the mean
/// coordinate sums of that snapshot's probe pairs.
struct MomentRow {
  probes::MomentReport report;
  double lx_mean = 0.0;
  double ly_mean = 0.0;
  double bound_i2 = 0.0;
  double bound_i4 = 0.0;
};

struct RunRecord {
  std::string run_id;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  ExperimentConfig config;
  std::vector<double> loss;  // loss[t] is the minibatch loss of update t
  // Ordered by snapshot iteration, then by probed layer.
  std::vector<kernels::KernelCurve> curves;
  std::vector<MomentRow> moments;
  mlp::Params final_params;

  const kernels::KernelCurve* curve(std::size_t layer, std::size_t iteration) const;
  const MomentRow* moment(std::size_t layer, std::size_t iteration) const;
};

std::string format_run_id(std::uint64_t config_hash);

data::Dataset load_dataset(const ExperimentConfig& config);

/// Trains the autoencoder and records kernel curves and moments for every
/// probed layer at each snapshot iteration. Probe pairs for a layer come from
/// the same generator at every snapshot, so curves differ only through the
/// weights. Throws DivergenceError on a non-finite loss.
RunRecord run_experiment(const ExperimentConfig& config);
RunRecord run_experiment(const ExperimentConfig& config, const data::Dataset& dataset);

/// Writes kernel_curves.csv, moments.csv, loss.csv, meta.csv and
/// params_final.bin for one or more runs into `dir`.
void write_records(const std::vector<RunRecord>& records, const std::filesystem::path& dir);

struct SweepRow {
  std::string run_id;
  optim::Rule rule = optim::Rule::kSgd;
  SweepParam param = SweepParam::kEpsilon;
  double value = 0.0;
  std::size_t layer = 0;
  std::size_t iteration = 0;
  double delta_k = 0.0;
  double delta_k_norm = 0.0;
  double delta_w = 0.0;
  double delta_w_norm = 0.0;
  bool diverged = false;
  std::optional<std::size_t> diverged_at;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<RunRecord> records;  // successful member runs
};

/// The member config for value index i: base with the swept parameter set and
/// seed = derive_seed(base.seed, i).
ExperimentConfig sweep_member(const SweepSpec& sweep, std::size_t index);

/// One run per value (in parallel); rows carry raw Δk and ΔW at the
/// measurement iteration plus their min-max normalization across the sweep,
/// computed per layer. Diverged members are flagged with NaN metrics and
/// excluded from normalization; a singleton normalizes to 0.
SweepResult run_sweep(const SweepSpec& sweep);
SweepResult run_sweep(const SweepSpec& sweep, const data::Dataset& dataset);

void write_sweep(const SweepResult& result, const std::filesystem::path& dir);

/// Min-max normalization to [0, 1]; NaN entries are ignored and kept. When all
/// finite values are equal the result is 0.
std::vector<double> min_max_normalize(const std::vector<double>& values);

struct InitKernelSpec {
  std::size_t width = 4096;
  std::size_t input_dim = 1024;
  std::string dist = "gengauss";  // gaussian | gengauss
  double alpha = 1.0;             // scale (stddev for gaussian)
  double beta = 2.0;              // shape, gengauss only
  std::size_t pairs = 64;
  std::size_t grid = 17;
  std::uint64_t seed = 1;
};

/// Normalized kernel of a freshly sampled IID layer against dense orthonormal
/// probe pairs.
kernels::KernelCurve run_init_kernel(const InitKernelSpec& spec);
void write_init_kernel(const InitKernelSpec& spec, const kernels::KernelCurve& curve,
                       const std::filesystem::path& dir);

}  // namespace kinv::harness
