#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "kinv/data.hpp"
#include "kinv/error.hpp"
#include "kinv/kernels.hpp"
#include "kinv/mlp.hpp"
#include "kinv/probes.hpp"
#include "kinv/rng.hpp"
#include "oracles.hpp"

namespace kinv::probes {
namespace {

Vector random_unit(std::size_t d, Rng& rng) {
  Vector x(d);
  for (double& v : x) v = rng.normal();
  return unit_normalize(x);
}

TEST(Moments, HandExamples) {
  const Matrix w = Matrix::from_rows({{1, 2}, {3, 4}});
  EXPECT_NEAR(moment_v(w), 7.5, 1e-12);
  EXPECT_NEAR(moment_c(w), 7.0, 1e-12);
  EXPECT_NEAR(oracle::moment_c_pairs(w), 7.0, 1e-12);
  EXPECT_EQ(moment_v(Matrix(3, 3)), 0.0);
  EXPECT_EQ(moment_c(Matrix::identity(2)), 0.0);
  EXPECT_THROW(moment_c(Matrix(3, 1)), ParameterError);
}

TEST(Moments, MomentCMatchesPairEnumeration) {
  Rng rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix w = sample_gaussian(2 + rng.index(6), 2 + rng.index(9), 1.0, rng);
    EXPECT_NEAR(moment_c(w), oracle::moment_c_pairs(w), 1e-12);
  }
}

TEST(Moments, MomentCPermutationInvariant) {
  Rng rng(5);
  const Matrix w = sample_gaussian(9, 11, 1.0, rng);
  Matrix rows(9, 11);
  Matrix cols(9, 11);
  for (std::size_t r = 0; r < 9; ++r) {
    for (std::size_t c = 0; c < 11; ++c) {
      rows(8 - r, c) = w(r, c);
      cols(r, (c * 4) % 11) = w(r, c);
    }
  }
  EXPECT_NEAR(moment_c(rows), moment_c(w), 1e-12);
  EXPECT_NEAR(moment_c(cols), moment_c(w), 1e-12);
}

TEST(Moments, GaussianMomentCWithinEnvelope) {
  Rng rng(6);
  const Matrix w = sample_gaussian(512, 512, 1.0, rng);
  EXPECT_LE(std::abs(moment_c(w)), 4.0 * moment_v(w) / std::sqrt(512.0 * 511.0 / 2.0));
}

TEST(Moments, FreshHeLayer) {
  std::size_t small_delta = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const mlp::Params p = mlp::init_he(mlp::MlpConfig{{256, 256, 256}}, rng);
    const double var = 2.0 / 256.0;
    const MomentReport r = moment_report(p.weights[0], 1, 0);
    EXPECT_NEAR(r.v / var, 1.0, 0.05);
    // Per-row estimate has variance v²/(n(n-1)/2) / n rows averaged.
    EXPECT_LE(std::abs(r.c), 5.0 * var / std::sqrt(256.0 * 255.0 / 2.0 * 256.0));
    // (row mean)² is (v/n)·χ²₁; the max over 256 rows exceeds 9 v/n about half
    // the time, so the union bound 256·P(χ²₁ > 20) < 0.002 sets the threshold.
    small_delta += r.delta_w <= 20.0 * var / 256.0;
  }
  EXPECT_GE(small_delta, 99u);
}

TEST(DeltaW, Examples) {
  EXPECT_NEAR(delta_w(Matrix::from_rows({{1, -1}, {2, 0}})), 1.0, 1e-12);
  EXPECT_EQ(delta_w(Matrix::from_rows({{1, -1}, {-2, 2}})), 0.0);
}

TEST(CoordinateSum, Examples) {
  EXPECT_NEAR(coordinate_sum(Vector{3, 4}), 1.4, 1e-12);
  EXPECT_EQ(coordinate_sum(Vector{1, -1}), 0.0);
  EXPECT_NEAR(coordinate_sum(Vector{30, 40}), 1.4, 1e-12);
  EXPECT_THROW(coordinate_sum(Vector{0, 0}), DegenerateInputError);
}

TEST(Bounds, Examples) {
  EXPECT_EQ(bound_i2(3.0, 0.0, 5.0), 0.0);
  EXPECT_NEAR(bound_i2(1.0, 0.5, 2.0), 1.0, 1e-12);
  EXPECT_EQ(bound_i2(1.0, 0.5, 0.0), 0.0);
  EXPECT_NEAR(bound_i4(0.1, 1.4, 2.0), 0.28, 1e-12);
  EXPECT_EQ(bound_i4(0.1, 0.0, 2.0), 0.0);
  EXPECT_EQ(bound_i4(-0.1, 1.4, 2.0), 0.0);
}

TEST(Hyp1Stat, Examples) {
  EXPECT_NEAR(hyp1_stat(Vector(16, 1.0)), 0.5, 1e-12);
  Vector one_hot(16, 0.0);
  one_hot[3] = 1.0;
  EXPECT_NEAR(hyp1_stat(one_hot), 2.0, 1e-12);
  EXPECT_NEAR(hyp1_stat(Vector(16, 7.0)), 0.5, 1e-12);
  EXPECT_THROW(hyp1_stat(Vector(4, 0.0)), DegenerateInputError);
}

TEST(DoubleSum, Identity) {
  Rng rng(10);
  for (std::size_t d : {4u, 64u, 1024u}) {
    for (int k = 0; k < 100; ++k) {
      const Vector x = random_unit(d, rng);
      const double l = coordinate_sum(x);
      double pairs = 0.0;
      const double total = std::accumulate(x.begin(), x.end(), 0.0);
      for (double xi : x) pairs += xi * (total - xi);
      EXPECT_NEAR(l * l - 1.0, pairs, 1e-12);
    }
  }
}

TEST(ZeroSumProbes, BoundsVanish) {
  Rng data_rng(3);
  const data::Dataset ds = data::synthetic(32, 16, data_rng, 0.5);
  Rng rng(4);
  for (int k = 0; k < 100; ++k) {
    const auto pair = kernels::sample_probe_pair(ds, 1.2, true, rng);
    const double lx = coordinate_sum(pair.x);
    const double ly = coordinate_sum(pair.y);
    EXPECT_LE(bound_i2(1.0, 0.3, lx), 1e-10);
    EXPECT_LE(bound_i4(0.3, lx, ly), 1e-10);
  }
}

TEST(PermEquivariance, DelegatesToWitness) {
  Rng rng(1);
  Matrix batch(4, 8);
  for (double& v : batch.data()) v = rng.uniform();
  const mlp::MlpConfig config{{8, 8, 8}};
  const std::vector<optim::Permutation> perms{{7, 6, 5, 4, 3, 2, 1, 0}};
  const optim::Hyperparams h{.rule = optim::Rule::kRmsProp};
  EXPECT_EQ(perm_equivariance(config, h, batch, 5, perms, 3),
            optim::is_index_commuting_witness(h, config, batch, 5, perms, 3));
  EXPECT_LE(perm_equivariance(config, h, batch, 5, perms, 3), 1e-9);
}

TEST(Ergodicity, SingleNeuronSingleNetworkIsZero) {
  const Matrix w = Matrix::from_rows({{0.5, 1.0, -0.2, 0.3}});
  const kernels::ProbePair probe{Vector{1, 0, 1, 0}, Vector{0, 1, 1, 0}, {}, 1.0, false};
  const std::vector<Matrix> layers{w};
  EXPECT_EQ(ergodicity_gap(layers, probe).gap, 0.0);
}

TEST(Ergodicity, UntrainedNetworksWithinEnvelope) {
  Rng data_rng(2);
  const data::Dataset ds = data::synthetic(64, 512, data_rng, 0.5);
  Rng rng(3);
  const auto probe = kernels::sample_probe_pair(ds, 1.0, true, rng);
  std::vector<Matrix> layers;
  for (std::size_t k = 0; k < 64; ++k) {
    Rng r = rng.split(k);
    layers.push_back(mlp::init_he(mlp::MlpConfig{{512, 512, 512}}, r).weights[1]);
  }
  const ErgodicityReport rep = ergodicity_gap(layers, probe);
  EXPECT_NEAR(rep.envelope, 5.0 * (1.0 / std::sqrt(512.0) + 1.0 / 8.0) * rep.v, 1e-15);
  EXPECT_LE(rep.gap, rep.envelope);
}

TEST(Ergodicity, TrainingEntryPointIsDeterministic) {
  Rng data_rng(2);
  const data::Dataset ds = data::synthetic(64, 16, data_rng, 0.5);
  Rng rng(3);
  const auto probe = kernels::sample_probe_pair(ds, 1.0, true, rng);
  const mlp::MlpConfig config{{16, 16, 16, 16}};
  const optim::Hyperparams h{.rule = optim::Rule::kSgd, .alpha = 0.01};
  ErgodicityOptions opts;
  opts.training_data = &ds.samples;
  opts.batch_size = 8;
  const auto a = ergodicity_gap(config, h, 5, 4, probe, 9, opts);
  const auto b = ergodicity_gap(config, h, 5, 4, probe, 9, opts);
  EXPECT_EQ(a.gap, b.gap);
  EXPECT_EQ(a.within, b.within);
}

}  // namespace
}  // namespace kinv::probes
