#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "kinv/data.hpp"
#include "kinv/matrix.hpp"

namespace kinv {
class Rng;
}

namespace kinv::kernels {

/// Two layer inputs x, y at angle theta. `direction` is the vector p with
/// y = cos(theta) x + sin(theta) p, ‖p‖ = ‖x‖ and x · p = 0.
struct ProbePair {
  Vector x;
  Vector y;
  Vector direction;
  double theta = 0.0;
  bool zero_sum = false;
};

/// Empirical normalized kernel of one layer over a theta grid.
struct KernelCurve {
  std::vector<double> thetas;
  std::vector<double> values;
  std::size_t layer = 0;
  std::size_t iteration = 0;
  std::size_t n_pairs = 0;
  // Means over every sampled pair of Σ x̂_i and Σ ŷ_i.
  double lx_mean = 0.0;
  double ly_mean = 0.0;
};

/// Degree-1 arc-cosine kernel v / (2π) · (sin θ + (π - θ) cos θ).
double arccos_kernel(double theta, double v);

/// Arc-cosine kernel normalized by its value at θ = 0:
/// κ(θ) = (sin θ + (π - θ) cos θ) / π.
double normalized_arccos(double theta);

/// Layer kernel of a trained row-and-column exchangeable weight matrix with
/// zero-sum inputs: (v - c) / (2π) · (sin θ + (π - θ) cos θ), where
/// v = E[W11²] and c = E[W11 W12]. c is clamped to >= 0 and v - c to >= 0.
double predicted_trained_kernel(double theta, double v, double c);

struct LayerKernel {
  // Σ σ(Wj·x) σ(Wj·y) / sqrt(Σ σ(Wj·x)² · Σ σ(Wj·y)²)
  double cos_theta = 0.0;
  // (1/n) Σ σ(Wj·x̂) σ(Wj·ŷ)
  double numerator = 0.0;
};

/// Throws DegenerateSignalError when either ReLU signal is identically zero.
LayerKernel empirical_layer_kernel(const Matrix& w, std::span<const double> x,
                                   std::span<const double> y);

/// Angle between x and y, accurate near 0 and π (2·atan2(‖x̂ - ŷ‖, ‖x̂ + ŷ‖)).
double vector_angle(std::span<const double> x, std::span<const double> y);

/// Probe-pair sampler working from a dataset row:
///  1. pick x uniformly and zero its last two coordinates;
///  2. build p on the zero coordinates of x (first d - 2 only) from U[0, 1];
///     with zero_sum, set x[d-2] = -Σx and p[d-1] = -Σp;
///     p is then rescaled to ‖x‖;
///  3. y = cos θ x + sin θ p.
/// Rows with no zero coordinate among the first d - 2, or with x = 0, are
/// redrawn; SamplingExhaustedError after `max_attempts` redraws.
ProbePair sample_probe_pair(const data::Dataset& dataset, double theta, bool zero_sum, Rng& rng,
                            std::size_t max_attempts = 1000);

/// Dense probe pair in R^d: x and p are an orthonormal pair obtained by
/// Gram-Schmidt on two U[0, 1] vectors.
ProbePair orthonormal_probe_pair(std::size_t d, double theta, Rng& rng);

/// n points evenly spaced on [0, π] with exact endpoints.
std::vector<double> uniform_grid(std::size_t n);

using PairSampler = std::function<ProbePair(double theta, Rng& rng)>;

/// Maximum redraws of a probe pair whose ReLU signal vanishes.
inline constexpr std::size_t kMaxDegenerateResamples = 100;

/// Mean empirical normalized kernel of `w` at each grid point over n_pairs
/// independent pairs. Each pair draws from its own generator split off one
/// base seed taken from `rng`, so the curve does not depend on threading.
KernelCurve kernel_curve(const Matrix& w, const PairSampler& sampler,
                         std::span<const double> theta_grid, std::size_t n_pairs, Rng& rng);

KernelCurve kernel_curve(const Matrix& w, const data::Dataset& dataset,
                         std::span<const double> theta_grid, bool zero_sum, std::size_t n_pairs,
                         Rng& rng);

/// Mean squared error of the curve to κ over its grid.
double delta_k(const KernelCurve& curve);

/// max over the grid of |value - κ(θ)|.
double sup_deviation(const KernelCurve& curve);

}  // namespace kinv::kernels
