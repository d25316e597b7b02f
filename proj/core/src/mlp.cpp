#include "kinv/mlp.hpp"

#include <algorithm>
#include <cmath>

#include "kinv/error.hpp"
#include "kinv/rng.hpp"

namespace kinv::mlp {

namespace {

void relu_inplace(std::span<double> values) {
  for (double& v : values) {
    v = v > 0.0 ? v : 0.0;
  }
}

}  // namespace

void MlpConfig::validate() const {
  if (widths.size() < 3) {
    throw ParameterError("MlpConfig: depth L must be >= 2 (need at least 3 widths)");
  }
  for (std::size_t w : widths) {
    if (w < 1) {
      throw ParameterError("MlpConfig: every width must be >= 1");
    }
  }
}

MlpConfig Params::config() const {
  MlpConfig c;
  if (weights.empty()) {
    return c;
  }
  c.widths.push_back(weights.front().cols());
  for (const auto& w : weights) {
    c.widths.push_back(w.rows());
  }
  return c;
}

void check_shapes(const Params& params) {
  for (std::size_t l = 1; l < params.weights.size(); ++l) {
    if (params.weights[l].cols() != params.weights[l - 1].rows()) {
      throw ShapeError("Params: layer " + std::to_string(l + 1) + " has shape " +
                       params.weights[l].shape_string() + " but layer " + std::to_string(l) +
                       " has " + params.weights[l - 1].shape_string());
    }
  }
}

Params init_he(const MlpConfig& config, Rng& rng) {
  config.validate();
  Params p;
  p.weights.reserve(config.depth());
  for (std::size_t l = 1; l < config.widths.size(); ++l) {
    const std::size_t fan_in = config.widths[l - 1];
    const double stddev = std::sqrt(2.0 / static_cast<double>(fan_in));
    p.weights.push_back(sample_gaussian(config.widths[l], fan_in, stddev, rng));
  }
  return p;
}

ForwardTrace forward(const Params& params, std::span<const double> x) {
  if (params.weights.empty()) {
    throw ShapeError("forward: network has no layers");
  }
  if (x.size() != params.weights.front().cols()) {
    throw ShapeError("forward: input length " + std::to_string(x.size()) + " but layer 1 is " +
                     params.weights.front().shape_string());
  }
  ForwardTrace trace;
  trace.input.assign(x.begin(), x.end());
  std::span<const double> a = trace.input;
  for (const auto& w : params.weights) {
    Vector z = matvec(w, a);
    Vector act = z;
    relu_inplace(act);
    trace.pre.push_back(std::move(z));
    trace.post.push_back(std::move(act));
    a = trace.post.back();
  }
  return trace;
}

BatchTrace forward_batch(const Params& params, const Matrix& inputs) {
  if (params.weights.empty()) {
    throw ShapeError("forward_batch: network has no layers");
  }
  if (inputs.cols() != params.weights.front().cols()) {
    throw ShapeError("forward_batch: inputs " + inputs.shape_string() + " but layer 1 is " +
                     params.weights.front().shape_string());
  }
  BatchTrace trace;
  trace.input = inputs;
  const Matrix* a = &trace.input;
  for (const auto& w : params.weights) {
    Matrix z = matmul_nt(*a, w);
    Matrix act = z;
    relu_inplace(act.data());
    trace.pre.push_back(std::move(z));
    trace.post.push_back(std::move(act));
    a = &trace.post.back();
  }
  return trace;
}

double l2_loss(std::span<const double> output, std::span<const double> target) {
  if (output.size() != target.size()) {
    throw ShapeError("l2_loss: output length " + std::to_string(output.size()) +
                     " vs target length " + std::to_string(target.size()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < output.size(); ++i) {
    const double d = output[i] - target[i];
    s += d * d;
  }
  return 0.5 * s;
}

double l2_loss(const Matrix& outputs, const Matrix& targets) {
  if (outputs.rows() != targets.rows() || outputs.cols() != targets.cols()) {
    throw ShapeError("l2_loss: outputs " + outputs.shape_string() + " vs targets " +
                     targets.shape_string());
  }
  if (outputs.rows() == 0) {
    throw ShapeError("l2_loss: empty batch");
  }
  double s = 0.0;
  for (std::size_t b = 0; b < outputs.rows(); ++b) {
    s += l2_loss(outputs.row(b), targets.row(b));
  }
  return s / static_cast<double>(outputs.rows());
}

Grads backward_batch(const Params& params, const BatchTrace& trace, const Matrix& targets) {
  check_shapes(params);
  const std::size_t depth = params.depth();
  if (trace.pre.size() != depth || trace.post.size() != depth) {
    throw ShapeError("backward: trace depth does not match network depth");
  }
  const Matrix& out = trace.output();
  if (out.rows() != targets.rows() || out.cols() != targets.cols()) {
    throw ShapeError("backward: outputs " + out.shape_string() + " vs targets " +
                     targets.shape_string());
  }
  const double inv_batch = 1.0 / static_cast<double>(out.rows());

  // delta holds dE/dZ(l) for every sample.
  Matrix delta(out.rows(), out.cols());
  {
    auto d = delta.data();
    auto o = out.data();
    auto t = targets.data();
    auto z = trace.pre.back().data();
    for (std::size_t i = 0; i < d.size(); ++i) {
      d[i] = z[i] > 0.0 ? (o[i] - t[i]) * inv_batch : 0.0;
    }
  }

  Grads grads;
  grads.weights.resize(depth);
  for (std::size_t l = depth; l-- > 0;) {
    const Matrix& a_prev = l == 0 ? trace.input : trace.post[l - 1];
    grads.weights[l] = matmul_tn(delta, a_prev);
    if (l == 0) {
      break;
    }
    Matrix back = matmul(delta, params.weights[l]);
    auto b = back.data();
    auto z = trace.pre[l - 1].data();
    for (std::size_t i = 0; i < b.size(); ++i) {
      if (!(z[i] > 0.0)) {
        b[i] = 0.0;
      }
    }
    delta = std::move(back);
  }
  return grads;
}

Grads backward(const Params& params, std::span<const ForwardTrace> traces, const Matrix& targets) {
  if (traces.empty()) {
    throw ShapeError("backward: empty batch");
  }
  if (traces.size() != targets.rows()) {
    throw ShapeError("backward: " + std::to_string(traces.size()) + " traces but " +
                     std::to_string(targets.rows()) + " targets");
  }
  const std::size_t depth = params.depth();
  auto stack = [&](auto&& get) {
    const Vector& first = get(traces.front());
    Matrix m(traces.size(), first.size());
    for (std::size_t b = 0; b < traces.size(); ++b) {
      const Vector& v = get(traces[b]);
      if (v.size() != first.size()) {
        throw ShapeError("backward: ragged traces");
      }
      std::copy(v.begin(), v.end(), m.row(b).begin());
    }
    return m;
  };
  BatchTrace batch;
  batch.input = stack([](const ForwardTrace& t) -> const Vector& { return t.input; });
  for (std::size_t l = 0; l < depth; ++l) {
    if (traces.front().pre.size() != depth) {
      throw ShapeError("backward: trace depth does not match network depth");
    }
    batch.pre.push_back(stack([l](const ForwardTrace& t) -> const Vector& { return t.pre.at(l); }));
    batch.post.push_back(stack([l](const ForwardTrace& t) -> const Vector& { return t.post.at(l); }));
  }
  return backward_batch(params, batch, targets);
}

Params zeros_like(const Params& params) {
  Params z;
  z.weights.reserve(params.weights.size());
  for (const auto& w : params.weights) {
    z.weights.emplace_back(w.rows(), w.cols());
  }
  return z;
}

}  // namespace kinv::mlp
