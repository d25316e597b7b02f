#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "kinv/mlp.hpp"

namespace kinv {
class Rng;
}

namespace kinv::optim {

enum class Rule { kSgd, kAdam, kRmsProp, kNadam };

std::string_view to_string(Rule rule);
/// Accepts "sgd", "adam", "rmsprop", "nadam" (case-insensitive).
Rule parse_rule(std::string_view name);

struct Hyperparams {
  Rule rule = Rule::kSgd;
  double alpha = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double rho = 0.9;
  double epsilon = 1e-8;
  // Step size at iteration t is alpha / (1 + decay * t).
  double decay = 0.0;

  void validate() const;
};

/// Per-weight moment buffers. t counts completed steps.
struct OptState {
  std::size_t t = 0;
  mlp::Params m;
  mlp::Params v;

  static OptState zeros_like(const mlp::Params& params);
};

/// One elementwise update of `params` in place. Every rule touches a weight
/// using only (w, g, m, v) at that same position, so the update commutes with
/// any relabeling of neurons.
void step(const Hyperparams& hyper, OptState& state, mlp::Params& params, const mlp::Grads& grads);

/// Draws `batch_size` rows of `data` uniformly with replacement.
Matrix sample_minibatch(const Matrix& data, std::size_t batch_size, Rng& rng);

/// Trains `params` as an autoencoder (targets = inputs) for `steps` minibatch
/// updates. on_step(t, loss) runs after each update with t = completed steps
/// and the pre-update batch loss; it may throw to stop training. A non-finite
/// loss raises DivergenceError carrying the iteration index.
void train_autoencoder(mlp::Params& params, OptState& state, const Hyperparams& hyper,
                       const Matrix& data, std::size_t steps, std::size_t batch_size, Rng& rng,
                       const std::function<void(std::size_t, double)>& on_step = {});

/// One permutation per hidden layer: perms[k] reorders the n(k+1) neurons of
/// hidden layer k + 1. perm[i] is the source index placed at position i.
using Permutation = std::vector<std::size_t>;

void check_permutation(const Permutation& perm, std::size_t n);

/// Relabels hidden neurons: rows of W(l) by perms[l-1] and columns of W(l+1)
/// by the same permutation. The network function is unchanged.
mlp::Params permute_params(const mlp::Params& params, const std::vector<Permutation>& perms);

/// A single training update: given params and one minibatch (inputs are also
/// the targets), mutate params.
using TrainStep = std::function<void(mlp::Params&, const Matrix& batch)>;

/// Runs `steps` updates from (a) the permuted initial network and (b) the
/// original network followed by the permutation, and returns
/// max over layers of ‖W_a - W_b‖_max / ‖W_b‖_max.
double permutation_deviation(const mlp::Params& initial, const std::vector<Permutation>& perms,
                             const Matrix& batch, std::size_t steps,
                             const std::function<TrainStep()>& make_trainer);

/// Autoencoder train-step factory for `hyper`: forward, backward, step.
std::function<TrainStep()> autoencoder_trainer(const Hyperparams& hyper);

/// Witness that a rule is index commuting: He-initializes `config` from
/// `seed`, trains `steps` updates on `batch` both ways and reports the
/// deviation (0 up to float reassociation for every shipped rule).
double is_index_commuting_witness(const Hyperparams& hyper, const mlp::MlpConfig& config,
                                  const Matrix& batch, std::uint64_t seed,
                                  const std::vector<Permutation>& perms, std::size_t steps = 1);

}  // namespace kinv::optim
