#include "kinv/optim.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <memory>

#include "kinv/error.hpp"
#include "kinv/rng.hpp"

namespace kinv::optim {

std::string_view to_string(Rule rule) {
  switch (rule) {
    case Rule::kSgd:
      return "sgd";
    case Rule::kAdam:
      return "adam";
    case Rule::kRmsProp:
      return "rmsprop";
    case Rule::kNadam:
      return "nadam";
  }
  return "unknown";
}

Rule parse_rule(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "sgd") return Rule::kSgd;
  if (lower == "adam") return Rule::kAdam;
  if (lower == "rmsprop") return Rule::kRmsProp;
  if (lower == "nadam") return Rule::kNadam;
  throw ParameterError("unknown optimizer rule '" + std::string(name) + "'");
}

void Hyperparams::validate() const {
  if (!(alpha > 0.0)) throw ParameterError("alpha must be > 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw ParameterError("beta1 must lie in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) throw ParameterError("beta2 must lie in [0, 1)");
  if (!(rho >= 0.0 && rho < 1.0)) throw ParameterError("rho must lie in [0, 1)");
  if (!(epsilon >= 0.0)) throw ParameterError("epsilon must be >= 0");
  if (!(decay >= 0.0)) throw ParameterError("decay must be >= 0");
}

OptState OptState::zeros_like(const mlp::Params& params) {
  return OptState{0, mlp::zeros_like(params), mlp::zeros_like(params)};
}

void step(const Hyperparams& hyper, OptState& state, mlp::Params& params, const mlp::Grads& grads) {
  const std::size_t depth = params.depth();
  if (grads.depth() != depth) {
    throw ShapeError("optim::step: gradient depth does not match params");
  }
  if (state.m.depth() != depth || state.v.depth() != depth) {
    throw ShapeError("optim::step: optimizer state depth does not match params");
  }
  for (std::size_t l = 0; l < depth; ++l) {
    const auto& w = params.weights[l];
    if (grads.weights[l].rows() != w.rows() || grads.weights[l].cols() != w.cols() ||
        state.m.weights[l].rows() != w.rows() || state.m.weights[l].cols() != w.cols() ||
        state.v.weights[l].rows() != w.rows() || state.v.weights[l].cols() != w.cols()) {
      throw ShapeError("optim::step: layer " + std::to_string(l + 1) + " shape mismatch, params " +
                       w.shape_string() + " grads " + grads.weights[l].shape_string());
    }
  }

  const double t1 = static_cast<double>(state.t + 1);
  const double lr = hyper.alpha / (1.0 + hyper.decay * t1);
  const double b1 = hyper.beta1;
  const double b2 = hyper.beta2;
  const double bias1 = 1.0 - std::pow(b1, t1);
  const double bias2 = 1.0 - std::pow(b2, t1);
  const double eps = hyper.epsilon;

  for (std::size_t l = 0; l < depth; ++l) {
    auto w = params.weights[l].data();
    auto g = grads.weights[l].data();
    auto m = state.m.weights[l].data();
    auto v = state.v.weights[l].data();
    const std::size_t n = w.size();
    switch (hyper.rule) {
      case Rule::kSgd:
        for (std::size_t i = 0; i < n; ++i) {
          w[i] -= lr * g[i];
        }
        break;
      case Rule::kAdam:
        for (std::size_t i = 0; i < n; ++i) {
          m[i] = b1 * m[i] + (1.0 - b1) * g[i];
          v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
          const double m_hat = m[i] / bias1;
          const double v_hat = v[i] / bias2;
          w[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
        }
        break;
      case Rule::kRmsProp:
        for (std::size_t i = 0; i < n; ++i) {
          v[i] = hyper.rho * v[i] + (1.0 - hyper.rho) * g[i] * g[i];
          w[i] -= lr * g[i] / (std::sqrt(v[i]) + eps);
        }
        break;
      case Rule::kNadam:
        for (std::size_t i = 0; i < n; ++i) {
          m[i] = b1 * m[i] + (1.0 - b1) * g[i];
          v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
          const double m_hat = m[i] / bias1;
          const double v_hat = v[i] / bias2;
          const double lookahead = b1 * m_hat + (1.0 - b1) * g[i] / bias1;
          w[i] -= lr * lookahead / (std::sqrt(v_hat) + eps);
        }
        break;
    }
  }
  ++state.t;
}

Matrix sample_minibatch(const Matrix& data, std::size_t batch_size, Rng& rng) {
  if (batch_size < 1 || data.rows() < 1) {
    throw ParameterError("sample_minibatch: need batch_size >= 1 and a nonempty dataset");
  }
  Matrix batch(batch_size, data.cols());
  for (std::size_t b = 0; b < batch_size; ++b) {
    const auto src = data.row(rng.index(data.rows()));
    std::copy(src.begin(), src.end(), batch.row(b).begin());
  }
  return batch;
}

void train_autoencoder(mlp::Params& params, OptState& state, const Hyperparams& hyper,
                       const Matrix& data, std::size_t steps, std::size_t batch_size, Rng& rng,
                       const std::function<void(std::size_t, double)>& on_step) {
  hyper.validate();
  mlp::check_shapes(params);
  if (state.m.depth() != params.depth()) {
    state = OptState::zeros_like(params);
  }
  for (std::size_t s = 0; s < steps; ++s) {
    const std::size_t iteration = state.t;
    const Matrix batch = sample_minibatch(data, batch_size, rng);
    double loss = 0.0;
    try {
      const auto trace = mlp::forward_batch(params, batch);
      loss = mlp::l2_loss(trace.output(), batch);
      if (!std::isfinite(loss)) {
        throw NumericError("non-finite loss");
      }
      const auto grads = mlp::backward_batch(params, trace, batch);
      step(hyper, state, params, grads);
      for (const auto& w : params.weights) {
        if (!w.all_finite()) {
          throw NumericError("non-finite weights");
        }
      }
    } catch (const NumericError& e) {
      throw DivergenceError(iteration, "training diverged at iteration " +
                                           std::to_string(iteration) + ": " + e.what());
    }
    if (on_step) {
      on_step(state.t, loss);
    }
  }
}

void check_permutation(const Permutation& perm, std::size_t n) {
  if (perm.size() != n) {
    throw ParameterError("permutation has length " + std::to_string(perm.size()) + ", expected " +
                         std::to_string(n));
  }
  std::vector<bool> seen(n, false);
  for (std::size_t p : perm) {
    if (p >= n || seen[p]) {
      throw ParameterError("permutation is not a bijection on [0, " + std::to_string(n) + ")");
    }
    seen[p] = true;
  }
}

mlp::Params permute_params(const mlp::Params& params, const std::vector<Permutation>& perms) {
  const std::size_t depth = params.depth();
  if (perms.size() + 1 != depth) {
    throw ParameterError("permute_params: need " + std::to_string(depth - 1) +
                         " permutations (one per hidden layer), got " + std::to_string(perms.size()));
  }
  for (std::size_t k = 0; k < perms.size(); ++k) {
    check_permutation(perms[k], params.weights[k].rows());
  }
  mlp::Params out;
  out.weights.reserve(depth);
  for (std::size_t l = 0; l < depth; ++l) {
    const Matrix& w = params.weights[l];
    const Permutation* row_perm = l < perms.size() ? &perms[l] : nullptr;
    const Permutation* col_perm = l > 0 ? &perms[l - 1] : nullptr;
    Matrix p(w.rows(), w.cols());
    for (std::size_t r = 0; r < w.rows(); ++r) {
      const std::size_t src_r = row_perm ? (*row_perm)[r] : r;
      for (std::size_t c = 0; c < w.cols(); ++c) {
        const std::size_t src_c = col_perm ? (*col_perm)[c] : c;
        p(r, c) = w(src_r, src_c);
      }
    }
    out.weights.push_back(std::move(p));
  }
  return out;
}

double permutation_deviation(const mlp::Params& initial, const std::vector<Permutation>& perms,
                             const Matrix& batch, std::size_t steps,
                             const std::function<TrainStep()>& make_trainer) {
  mlp::Params permuted_first = permute_params(initial, perms);
  mlp::Params trained = initial;
  TrainStep train_a = make_trainer();
  TrainStep train_b = make_trainer();
  for (std::size_t s = 0; s < steps; ++s) {
    train_a(permuted_first, batch);
    train_b(trained, batch);
  }
  const mlp::Params permuted_after = permute_params(trained, perms);

  double worst = 0.0;
  for (std::size_t l = 0; l < initial.depth(); ++l) {
    auto a = permuted_first.weights[l].data();
    auto b = permuted_after.weights[l].data();
    double diff = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      diff = std::max(diff, std::abs(a[i] - b[i]));
      scale = std::max(scale, std::abs(b[i]));
    }
    if (diff > 0.0) {
      worst = std::max(worst, scale > 0.0 ? diff / scale : diff);
    }
  }
  return worst;
}

std::function<TrainStep()> autoencoder_trainer(const Hyperparams& hyper) {
  hyper.validate();
  return [hyper]() -> TrainStep {
    auto state = std::make_shared<OptState>();
    return [hyper, state](mlp::Params& params, const Matrix& batch) {
      if (state->m.depth() == 0) {
        *state = OptState::zeros_like(params);
      }
      const auto trace = mlp::forward_batch(params, batch);
      const auto grads = mlp::backward_batch(params, trace, batch);
      step(hyper, *state, params, grads);
    };
  };
}

double is_index_commuting_witness(const Hyperparams& hyper, const mlp::MlpConfig& config,
                                  const Matrix& batch, std::uint64_t seed,
                                  const std::vector<Permutation>& perms, std::size_t steps) {
  config.validate();
  if (perms.size() + 1 != config.depth()) {
    throw ParameterError("is_index_commuting_witness: need one permutation per hidden layer");
  }
  for (std::size_t k = 0; k < perms.size(); ++k) {
    check_permutation(perms[k], config.widths[k + 1]);
  }
  Rng rng(seed);
  const mlp::Params initial = mlp::init_he(config, rng);
  return permutation_deviation(initial, perms, batch, steps, autoencoder_trainer(hyper));
}

}  // namespace kinv::optim
