#pragma once

// Test-only reference computations. Each one takes a route independent of the
// library code it is used to check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

#include "kinv/matrix.hpp"
#include "kinv/mlp.hpp"

namespace kinv::oracle {

/// Batch-mean ½‖A(L) - target‖² evaluated by a plain scalar forward pass.
inline double scalar_loss(const mlp::Params& params, const Matrix& inputs, const Matrix& targets) {
  double total = 0.0;
  for (std::size_t b = 0; b < inputs.rows(); ++b) {
    std::vector<double> a(inputs.row(b).begin(), inputs.row(b).end());
    for (const auto& w : params.weights) {
      std::vector<double> next(w.rows(), 0.0);
      for (std::size_t j = 0; j < w.rows(); ++j) {
        double z = 0.0;
        for (std::size_t i = 0; i < w.cols(); ++i) z += w(j, i) * a[i];
        next[j] = std::max(z, 0.0);
      }
      a = std::move(next);
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double d = a[i] - targets(b, i);
      total += 0.5 * d * d;
    }
  }
  return total / static_cast<double>(inputs.rows());
}

/// Central finite differences of scalar_loss with step h for every weight.
inline mlp::Params finite_difference_grads(mlp::Params params, const Matrix& inputs,
                                           const Matrix& targets, double h) {
  mlp::Params grads = mlp::zeros_like(params);
  for (std::size_t l = 0; l < params.depth(); ++l) {
    auto w = params.weights[l].data();
    auto g = grads.weights[l].data();
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double orig = w[i];
      w[i] = orig + h;
      const double up = scalar_loss(params, inputs, targets);
      w[i] = orig - h;
      const double down = scalar_loss(params, inputs, targets);
      w[i] = orig;
      g[i] = (up - down) / (2.0 * h);
    }
  }
  return grads;
}

/// E[W11 W12] estimate by enumerating every ordered pair of distinct columns.
inline double moment_c_pairs(const Matrix& w) {
  double total = 0.0;
  for (std::size_t r = 0; r < w.rows(); ++r) {
    double row_sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < w.cols(); ++i) {
      for (std::size_t k = 0; k < w.cols(); ++k) {
        if (i == k) continue;
        row_sum += w(r, i) * w(r, k);
        ++count;
      }
    }
    total += row_sum / static_cast<double>(count);
  }
  return total / static_cast<double>(w.rows());
}

/// Composite Simpson rule on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, std::size_t n) {
  const double h = (b - a) / static_cast<double>(n);
  double s = f(a) + f(b);
  for (std::size_t i = 1; i < n; ++i) {
    s += f(a + h * static_cast<double>(i)) * (i % 2 == 1 ? 4.0 : 2.0);
  }
  return s * h / 3.0;
}

/// Second moment of the generalized Gaussian by quadrature of its density.
inline double gen_gaussian_second_moment(double alpha, double beta) {
  const double norm = beta / (2.0 * alpha * std::tgamma(1.0 / beta));
  const auto density = [&](double w) { return norm * std::exp(-std::pow(std::abs(w / alpha), beta)); };
  // exp(-60) is far below double rounding of the bulk.
  const double half_width = alpha * std::pow(60.0, 1.0 / beta);
  return simpson([&](double w) { return w * w * density(w); }, -half_width, half_width, 200000);
}

/// E[σ(Zx) σ(Zy)] for standard bivariate normal with correlation cos θ, by 2-D
/// quadrature in polar coordinates; the ratio to its θ = 0 value is κ(θ).
inline double relu_gaussian_kernel(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  // Zx = r cos φ, Zy = r cos(φ - θ)
  const auto angular = [&](double phi) {
    const double a = std::cos(phi);
    const double b = c * std::cos(phi) + s * std::sin(phi);
    return (a > 0.0 && b > 0.0) ? a * b : 0.0;
  };
  const double radial = 2.0;  // ∫_0^∞ r³ e^{-r²/2} dr
  return radial / (2.0 * std::numbers::pi) *
         simpson(angular, -std::numbers::pi, std::numbers::pi, 200000);
}

/// Worst entry of |a - b| / max(|a|, |b|, floor) over all weights.
inline double max_relative_error(const mlp::Params& a, const mlp::Params& b, double floor = 1e-3) {
  double worst = 0.0;
  for (std::size_t l = 0; l < a.depth(); ++l) {
    const auto x = a.weights[l].data();
    const auto y = b.weights[l].data();
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double scale = std::max({std::abs(x[i]), std::abs(y[i]), floor});
      worst = std::max(worst, std::abs(x[i] - y[i]) / scale);
    }
  }
  return worst;
}

}  // namespace kinv::oracle
