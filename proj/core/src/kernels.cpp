#include "kinv/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include "kinv/error.hpp"
#include "kinv/parallel.hpp"
#include "kinv/rng.hpp"

namespace kinv::kernels {

namespace {

constexpr double kPi = std::numbers::pi;

void check_theta(double theta, const char* op) {
  if (!(theta >= 0.0 && theta <= kPi)) {
    throw ParameterError(std::string(op) + ": theta " + std::to_string(theta) +
                         " outside [0, pi]");
  }
}

double angular_factor(double theta) {
  return std::sin(theta) + (kPi - theta) * std::cos(theta);
}

// Kernel from the pre-activations W x̂ and W ŷ of one pair.
std::optional<LayerKernel> kernel_from_preacts(std::span<const double> zx,
                                               std::span<const double> zy) {
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t j = 0; j < zx.size(); ++j) {
    const double ax = zx[j] > 0.0 ? zx[j] : 0.0;
    const double ay = zy[j] > 0.0 ? zy[j] : 0.0;
    sxy += ax * ay;
    sxx += ax * ax;
    syy += ay * ay;
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) {
    return std::nullopt;
  }
  LayerKernel k;
  k.cos_theta = std::min(1.0, sxy / std::sqrt(sxx * syy));
  k.numerator = sxy / static_cast<double>(zx.size());
  return k;
}

double coordinate_sum_of_unit(std::span<const double> v) {
  const Vector u = unit_normalize(v);
  double s = 0.0;
  for (double c : u) {
    s += c;
  }
  return s;
}

}  // namespace

double arccos_kernel(double theta, double v) {
  check_theta(theta, "arccos_kernel");
  if (!(v >= 0.0)) {
    throw ParameterError("arccos_kernel: second moment must be >= 0");
  }
  return v / (2.0 * kPi) * angular_factor(theta);
}

double normalized_arccos(double theta) {
  check_theta(theta, "normalized_arccos");
  return angular_factor(theta) / kPi;
}

double predicted_trained_kernel(double theta, double v, double c) {
  check_theta(theta, "predicted_trained_kernel");
  const double c_clamped = std::max(c, 0.0);
  const double scale = std::max(v - c_clamped, 0.0);
  return scale / (2.0 * kPi) * angular_factor(theta);
}

LayerKernel empirical_layer_kernel(const Matrix& w, std::span<const double> x,
                                   std::span<const double> y) {
  if (x.size() != w.cols() || y.size() != w.cols()) {
    throw ShapeError("empirical_layer_kernel: layer " + w.shape_string() + " with inputs of length " +
                     std::to_string(x.size()) + " and " + std::to_string(y.size()));
  }
  const Vector xh = unit_normalize(x);
  const Vector yh = unit_normalize(y);
  const Vector zx = matvec(w, xh);
  const Vector zy = matvec(w, yh);
  auto k = kernel_from_preacts(zx, zy);
  if (!k) {
    throw DegenerateSignalError("empirical_layer_kernel: ReLU signal is identically zero");
  }
  return *k;
}

double vector_angle(std::span<const double> x, std::span<const double> y) {
  const Vector xh = unit_normalize(x);
  const Vector yh = unit_normalize(y);
  double diff = 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < xh.size(); ++i) {
    diff += (xh[i] - yh[i]) * (xh[i] - yh[i]);
    sum += (xh[i] + yh[i]) * (xh[i] + yh[i]);
  }
  return 2.0 * std::atan2(std::sqrt(diff), std::sqrt(sum));
}

ProbePair sample_probe_pair(const data::Dataset& dataset, double theta, bool zero_sum, Rng& rng,
                            std::size_t max_attempts) {
  check_theta(theta, "sample_probe_pair");
  const std::size_t d = dataset.dim();
  if (d < 4) {
    throw ParameterError("sample_probe_pair: dataset dimension must be >= 4");
  }
  if (dataset.size() == 0) {
    throw ParameterError("sample_probe_pair: empty dataset");
  }
  const std::size_t body = d - 2;
  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
    const auto row = dataset.samples.row(rng.index(dataset.size()));
    Vector x(row.begin(), row.end());
    x[d - 2] = 0.0;
    x[d - 1] = 0.0;
    const bool has_zero = std::any_of(x.begin(), x.begin() + body, [](double v) { return v == 0.0; });
    const bool has_mass = std::any_of(x.begin(), x.begin() + body, [](double v) { return v != 0.0; });
    if (!has_zero || !has_mass) {
      continue;
    }

    Vector p(d, 0.0);
    for (std::size_t i = 0; i < body; ++i) {
      if (x[i] == 0.0) {
        p[i] = rng.uniform_pos();
      }
    }
    const double x_norm0 = norm2(x);
    const double p_norm0 = norm2(p);
    for (double& v : p) {
      v *= x_norm0 / p_norm0;
    }

    if (zero_sum) {
      double sx = 0.0;
      for (double v : x) sx += v;
      x[d - 2] = -sx;
      double sp = 0.0;
      for (double v : p) sp += v;
      p[d - 1] = -sp;
    }

    // Restore ‖p‖ = ‖x‖ so the angle is exact; scaling keeps Σp = 0.
    const double x_norm = norm2(x);
    const double p_norm = norm2(p);
    for (double& v : p) {
      v *= x_norm / p_norm;
    }

    ProbePair pair;
    pair.theta = theta;
    pair.zero_sum = zero_sum;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    pair.y.resize(d);
    for (std::size_t i = 0; i < d; ++i) {
      pair.y[i] = c * x[i] + s * p[i];
    }
    pair.x = std::move(x);
    pair.direction = std::move(p);
    return pair;
  }
  throw SamplingExhaustedError("sample_probe_pair: no usable sample after " +
                               std::to_string(max_attempts) +
                               " draws (rows need a zero among their first d-2 coordinates)");
}

ProbePair orthonormal_probe_pair(std::size_t d, double theta, Rng& rng) {
  check_theta(theta, "orthonormal_probe_pair");
  if (d < 2) {
    throw ParameterError("orthonormal_probe_pair: dimension must be >= 2");
  }
  Vector u(d);
  Vector w(d);
  for (double& v : u) v = rng.uniform();
  for (double& v : w) v = rng.uniform();
  u = unit_normalize(u);
  // Two Gram-Schmidt passes keep u · w at rounding level.
  for (int pass = 0; pass < 2; ++pass) {
    const double proj = dot(u, w);
    for (std::size_t i = 0; i < d; ++i) {
      w[i] -= proj * u[i];
    }
  }
  w = unit_normalize(w);
  ProbePair pair;
  pair.theta = theta;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  pair.y.resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    pair.y[i] = c * u[i] + s * w[i];
  }
  pair.x = std::move(u);
  pair.direction = std::move(w);
  return pair;
}

std::vector<double> uniform_grid(std::size_t n) {
  if (n == 0) {
    throw ParameterError("uniform_grid: need at least one point");
  }
  if (n == 1) {
    return {0.0};
  }
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) {
    grid[i] = i + 1 == n ? kPi : kPi * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return grid;
}

KernelCurve kernel_curve(const Matrix& w, const PairSampler& sampler,
                         std::span<const double> theta_grid, std::size_t n_pairs, Rng& rng) {
  if (theta_grid.empty()) {
    throw ParameterError("kernel_curve: empty theta grid");
  }
  if (n_pairs < 1) {
    throw ParameterError("kernel_curve: n_pairs must be >= 1");
  }
  for (std::size_t g = 0; g < theta_grid.size(); ++g) {
    check_theta(theta_grid[g], "kernel_curve");
    if (g > 0 && !(theta_grid[g] > theta_grid[g - 1])) {
      throw ParameterError("kernel_curve: theta grid must be strictly increasing");
    }
  }
  const Rng base(rng.next_u64());
  const std::size_t d = w.cols();

  std::vector<double> values(theta_grid.size());
  std::vector<double> lx_sums(theta_grid.size());
  std::vector<double> ly_sums(theta_grid.size());

  parallel_for(theta_grid.size(), [&](std::size_t g) {
    const double theta = theta_grid[g];
    std::vector<Rng> streams;
    std::vector<ProbePair> pairs;
    streams.reserve(n_pairs);
    pairs.reserve(n_pairs);
    Matrix xs(n_pairs, d);
    Matrix ys(n_pairs, d);
    for (std::size_t k = 0; k < n_pairs; ++k) {
      streams.push_back(base.split(g * n_pairs + k));
      pairs.push_back(sampler(theta, streams.back()));
      if (pairs[k].x.size() != d || pairs[k].y.size() != d) {
        throw ShapeError("kernel_curve: probe dimension " + std::to_string(pairs[k].x.size()) +
                         " does not match layer " + w.shape_string());
      }
      const Vector xh = unit_normalize(pairs[k].x);
      const Vector yh = unit_normalize(pairs[k].y);
      std::copy(xh.begin(), xh.end(), xs.row(k).begin());
      std::copy(yh.begin(), yh.end(), ys.row(k).begin());
    }
    const Matrix zx = matmul_nt(xs, w);
    const Matrix zy = matmul_nt(ys, w);

    double acc = 0.0;
    double lx = 0.0;
    double ly = 0.0;
    for (std::size_t k = 0; k < n_pairs; ++k) {
      auto kernel = kernel_from_preacts(zx.row(k), zy.row(k));
      std::size_t redraws = 0;
      while (!kernel) {
        if (++redraws > kMaxDegenerateResamples) {
          throw SamplingExhaustedError("kernel_curve: ReLU signal vanished for " +
                                       std::to_string(kMaxDegenerateResamples) +
                                       " consecutive probe pairs");
        }
        pairs[k] = sampler(theta, streams[k]);
        try {
          kernel = empirical_layer_kernel(w, pairs[k].x, pairs[k].y);
        } catch (const DegenerateSignalError&) {
          kernel.reset();
        }
      }
      acc += kernel->cos_theta;
      lx += coordinate_sum_of_unit(pairs[k].x);
      ly += coordinate_sum_of_unit(pairs[k].y);
    }
    values[g] = acc / static_cast<double>(n_pairs);
    lx_sums[g] = lx;
    ly_sums[g] = ly;
  });

  KernelCurve curve;
  curve.thetas.assign(theta_grid.begin(), theta_grid.end());
  curve.values = std::move(values);
  curve.n_pairs = n_pairs;
  double lx = 0.0;
  double ly = 0.0;
  for (std::size_t g = 0; g < theta_grid.size(); ++g) {
    lx += lx_sums[g];
    ly += ly_sums[g];
  }
  const double total = static_cast<double>(theta_grid.size() * n_pairs);
  curve.lx_mean = lx / total;
  curve.ly_mean = ly / total;
  return curve;
}

KernelCurve kernel_curve(const Matrix& w, const data::Dataset& dataset,
                         std::span<const double> theta_grid, bool zero_sum, std::size_t n_pairs,
                         Rng& rng) {
  if (dataset.dim() != w.cols()) {
    throw ShapeError("kernel_curve: dataset dimension " + std::to_string(dataset.dim()) +
                     " does not match layer " + w.shape_string());
  }
  PairSampler sampler = [&dataset, zero_sum](double theta, Rng& r) {
    return sample_probe_pair(dataset, theta, zero_sum, r);
  };
  return kernel_curve(w, sampler, theta_grid, n_pairs, rng);
}

double delta_k(const KernelCurve& curve) {
  if (curve.values.empty()) {
    throw ParameterError("delta_k: empty curve");
  }
  double s = 0.0;
  for (std::size_t g = 0; g < curve.values.size(); ++g) {
    const double e = curve.values[g] - normalized_arccos(curve.thetas[g]);
    s += e * e;
  }
  return s / static_cast<double>(curve.values.size());
}

double sup_deviation(const KernelCurve& curve) {
  double worst = 0.0;
  for (std::size_t g = 0; g < curve.values.size(); ++g) {
    worst = std::max(worst, std::abs(curve.values[g] - normalized_arccos(curve.thetas[g])));
  }
  return worst;
}

}  // namespace kinv::kernels
