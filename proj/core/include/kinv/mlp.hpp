#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "kinv/matrix.hpp"

namespace kinv {
class Rng;
}

namespace kinv::mlp {

/// Layer widths n(0), ..., n(L). There are L weight layers and no biases.
struct MlpConfig {
  std::vector<std::size_t> widths;

  std::size_t depth() const noexcept { return widths.empty() ? 0 : widths.size() - 1; }
  /// Throws ParameterError unless L >= 2 and every width >= 1.
  void validate() const;
};

/// weights[l - 1] is W(l), shaped n(l) × n(l-1); row j holds the incoming
/// weights of neuron j in layer l.
struct Params {
  std::vector<Matrix> weights;

  std::size_t depth() const noexcept { return weights.size(); }
  MlpConfig config() const;
  friend bool operator==(const Params&, const Params&) = default;
};

using Grads = Params;

/// Per-sample activations. pre[l - 1] = Z(l), post[l - 1] = A(l) = max(0, Z(l)).
struct ForwardTrace {
  Vector input;
  std::vector<Vector> pre;
  std::vector<Vector> post;

  const Vector& output() const { return post.back(); }
};

/// Batched activations, one sample per row.
struct BatchTrace {
  Matrix input;
  std::vector<Matrix> pre;
  std::vector<Matrix> post;

  const Matrix& output() const { return post.back(); }
};

/// Checks that the weight shapes chain according to `config`.
void check_shapes(const Params& params);

/// He initialization: W(l) entries IID N(0, 2 / n(l-1)).
Params init_he(const MlpConfig& config, Rng& rng);

ForwardTrace forward(const Params& params, std::span<const double> x);
BatchTrace forward_batch(const Params& params, const Matrix& inputs);

/// ½‖output - target‖².
double l2_loss(std::span<const double> output, std::span<const double> target);
/// Batch mean of ½‖output_b - target_b‖² over rows.
double l2_loss(const Matrix& outputs, const Matrix& targets);

/// Exact gradient of the batch-mean ℓ2 loss. The ReLU derivative at 0 is 0.
Grads backward(const Params& params, std::span<const ForwardTrace> traces, const Matrix& targets);
Grads backward_batch(const Params& params, const BatchTrace& trace, const Matrix& targets);

/// Zero tensors shaped like `params`.
Params zeros_like(const Params& params);

}  // namespace kinv::mlp
