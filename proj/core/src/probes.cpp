#include "kinv/probes.hpp"

#include <algorithm>
#include <cmath>

#include "kinv/data.hpp"
#include "kinv/error.hpp"
#include "kinv/parallel.hpp"
#include "kinv/rng.hpp"

namespace kinv::probes {

double moment_v(const Matrix& w) {
  if (w.empty()) {
    throw ParameterError("moment_v: empty matrix");
  }
  double s = 0.0;
  for (double v : w.data()) {
    s += v * v;
  }
  return s / static_cast<double>(w.size());
}

double moment_c(const Matrix& w) {
  if (w.cols() < 2 || w.rows() < 1) {
    throw ParameterError("moment_c: need at least one row and two columns, got " +
                         w.shape_string());
  }
  const double n = static_cast<double>(w.cols());
  double total = 0.0;
  for (std::size_t r = 0; r < w.rows(); ++r) {
    double sum = 0.0;
    double sum_sq = 0.0;
    for (double v : w.row(r)) {
      sum += v;
      sum_sq += v * v;
    }
    total += (sum * sum - sum_sq) / (n * (n - 1.0));
  }
  return total / static_cast<double>(w.rows());
}

double delta_w(const Matrix& w) {
  if (w.empty()) {
    throw ParameterError("delta_w: empty matrix");
  }
  double worst = 0.0;
  for (std::size_t r = 0; r < w.rows(); ++r) {
    double sum = 0.0;
    for (double v : w.row(r)) {
      sum += v;
    }
    const double mean = sum / static_cast<double>(w.cols());
    worst = std::max(worst, mean * mean);
  }
  return worst;
}

MomentReport moment_report(const Matrix& w, std::size_t layer, std::size_t iteration) {
  return MomentReport{moment_v(w), w.cols() >= 2 ? moment_c(w) : 0.0, delta_w(w), layer,
                      iteration};
}

double coordinate_sum(std::span<const double> x) {
  const Vector u = unit_normalize(x);
  double s = 0.0;
  for (double v : u) {
    s += v;
  }
  return s;
}

double bound_i2(double v, double c, double l) {
  const double c_pos = std::max(c, 0.0);
  return std::abs(l) * std::sqrt(c_pos) * std::sqrt(std::max(v - c_pos, 0.0));
}

double bound_i4(double c, double lx, double ly) { return std::max(c, 0.0) * std::abs(lx * ly); }

double hyp1_stat(std::span<const double> x) {
  const double n = norm2(x);
  if (!(n > 0.0)) {
    throw DegenerateInputError("hyp1_stat: zero vector");
  }
  double peak = 0.0;
  for (double v : x) {
    peak = std::max(peak, std::abs(v));
  }
  return std::pow(static_cast<double>(x.size()), 0.25) * peak / n;
}

double perm_equivariance(const mlp::MlpConfig& config, const optim::Hyperparams& hyper,
                         const Matrix& batch, std::uint64_t seed,
                         const std::vector<optim::Permutation>& perms, std::size_t steps) {
  return optim::is_index_commuting_witness(hyper, config, batch, seed, perms, steps);
}

ErgodicityReport ergodicity_gap(std::span<const Matrix> layers, const kernels::ProbePair& probe) {
  if (layers.empty()) {
    throw ParameterError("ergodicity_gap: ensemble size K must be >= 1");
  }
  const Vector xh = unit_normalize(probe.x);
  const Vector yh = unit_normalize(probe.y);
  auto product = [&](std::span<const double> row) {
    const double a = dot(row, xh);
    const double b = dot(row, yh);
    return (a > 0.0 ? a : 0.0) * (b > 0.0 ? b : 0.0);
  };

  const Matrix& first = layers.front();
  ErgodicityReport report;
  double within = 0.0;
  for (std::size_t j = 0; j < first.rows(); ++j) {
    within += product(first.row(j));
  }
  report.within = within / static_cast<double>(first.rows());

  double ensemble = 0.0;
  for (const Matrix& w : layers) {
    if (w.rows() != first.rows() || w.cols() != first.cols()) {
      throw ShapeError("ergodicity_gap: ensemble members have different shapes");
    }
    ensemble += product(w.row(0));
  }
  report.ensemble = ensemble / static_cast<double>(layers.size());
  report.gap = std::abs(report.within - report.ensemble);
  report.v = moment_v(first);
  report.envelope = 5.0 *
                    (1.0 / std::sqrt(static_cast<double>(first.rows())) +
                     1.0 / std::sqrt(static_cast<double>(layers.size()))) *
                    report.v;
  return report;
}

ErgodicityReport ergodicity_gap(const mlp::MlpConfig& config, const optim::Hyperparams& hyper,
                                std::size_t train_steps, std::size_t ensemble_size,
                                const kernels::ProbePair& probe, std::uint64_t seed,
                                const ErgodicityOptions& options) {
  config.validate();
  if (ensemble_size < 1) {
    throw ParameterError("ergodicity_gap: ensemble size K must be >= 1");
  }
  if (options.layer < 1 || options.layer > config.depth()) {
    throw ParameterError("ergodicity_gap: layer " + std::to_string(options.layer) +
                         " outside [1, " + std::to_string(config.depth()) + "]");
  }
  const std::size_t layer_in = config.widths[options.layer - 1];
  if (probe.x.size() != layer_in || probe.y.size() != layer_in) {
    throw ShapeError("ergodicity_gap: probe dimension does not match layer input width");
  }

  const Rng root(seed);
  Matrix generated;
  const Matrix* data = options.training_data;
  if (data == nullptr) {
    Rng data_rng = root.split(0xda7a);
    generated = data::synthetic(1024, config.widths.front(), data_rng, 0.5).samples;
    data = &generated;
  }
  if (data->cols() != config.widths.front()) {
    throw ShapeError("ergodicity_gap: training data width does not match the network input");
  }

  std::vector<Matrix> layers(ensemble_size);
  parallel_for(ensemble_size, [&](std::size_t k) {
    Rng member = root.split(k);
    Rng init_rng = member.split(1);
    Rng batch_rng = member.split(2);
    mlp::Params params = mlp::init_he(config, init_rng);
    optim::OptState state = optim::OptState::zeros_like(params);
    optim::train_autoencoder(params, state, hyper, *data, train_steps, options.batch_size,
                             batch_rng);
    layers[k] = std::move(params.weights[options.layer - 1]);
  });
  return ergodicity_gap(std::span<const Matrix>(layers), probe);
}

}  // namespace kinv::probes
