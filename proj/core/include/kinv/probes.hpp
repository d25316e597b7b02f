#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "kinv/kernels.hpp"
#include "kinv/matrix.hpp"
#include "kinv/mlp.hpp"
#include "kinv/optim.hpp"

namespace kinv::probes {

struct MomentReport {
  double v = 0.0;        // estimate of E[W11²]
  double c = 0.0;        // estimate of E[W11 W12]; may be negative
  double delta_w = 0.0;  // max_j (row mean)²
  std::size_t layer = 0;
  std::size_t iteration = 0;
};

/// Mean of W_ji² over all entries.
double moment_v(const Matrix& w);

/// Unbiased within-row distinct-pair product average:
/// mean over rows of ((Σ_i W_ji)² - Σ_i W_ji²) / (n (n - 1)).
/// Throws ParameterError for fewer than two columns.
double moment_c(const Matrix& w);

/// max over rows of (row mean)².
double delta_w(const Matrix& w);

MomentReport moment_report(const Matrix& w, std::size_t layer, std::size_t iteration);

/// Σ x̂_i for the unit-normalized input.
double coordinate_sum(std::span<const double> x);

/// |L| √max(c, 0) √max(v - c, 0). Bounds the cross term between the
/// centered weights and the row-mean component of one input.
double bound_i2(double v, double c, double l);

/// max(c, 0) |Lx Ly|. Bounds the term driven by row means alone.
double bound_i4(double c, double lx, double ly);

/// m^(1/4) max_i |x_i| / ‖x‖ with m = dim(x). Small values mean no single
/// coordinate dominates the input.
double hyp1_stat(std::span<const double> x);

/// Maximum relative weight deviation between "permute then train" and
/// "train then permute" (see optim::is_index_commuting_witness).
double perm_equivariance(const mlp::MlpConfig& config, const optim::Hyperparams& hyper,
                         const Matrix& batch, std::uint64_t seed,
                         const std::vector<optim::Permutation>& perms, std::size_t steps = 1);

struct ErgodicityReport {
  double within = 0.0;    // (1/n) Σ_j σ(Wj·x̂) σ(Wj·ŷ) in network 1
  double ensemble = 0.0;  // (1/K) Σ_k σ(W1·x̂) σ(W1·ŷ) over networks
  double gap = 0.0;       // |within - ensemble|
  double v = 0.0;         // moment_v of network 1's probed layer
  double envelope = 0.0;  // 5 (1/√n + 1/√K) v
};

struct ErgodicityOptions {
  std::size_t layer = 2;       // 1-based weight layer
  std::size_t batch_size = 64;
  const Matrix* training_data = nullptr;  // rows sampled with replacement
};

/// Trains K networks from seeds split off `seed` for `train_steps` minibatch
/// steps each, then compares the neuron average of one network with the
/// ensemble average at a fixed neuron (index 0).
ErgodicityReport ergodicity_gap(const mlp::MlpConfig& config, const optim::Hyperparams& hyper,
                                std::size_t train_steps, std::size_t ensemble_size,
                                const kernels::ProbePair& probe, std::uint64_t seed,
                                const ErgodicityOptions& options);

/// Same statistic on already-trained layer matrices (one per ensemble member).
ErgodicityReport ergodicity_gap(std::span<const Matrix> layers, const kernels::ProbePair& probe);

}  // namespace kinv::probes
