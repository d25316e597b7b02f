#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "kinv/config.hpp"
#include "kinv/error.hpp"
#include "kinv/harness.hpp"

namespace kinv::harness {
namespace {

namespace fs = std::filesystem;

ExperimentConfig tiny_config() {
  ExperimentConfig c;
  c.synthetic_n = 64;
  c.synthetic_d = 16;
  c.widths = {16, 16, 16, 16};
  c.batch_size = 8;
  c.total_iterations = 10;
  c.snapshot_iterations = {0, 10};
  c.theta_grid = 5;
  c.n_pairs = 4;
  c.probed_layers = {1, 2, 3};
  c.seed = 7;
  return c;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  return dir;
}

TEST(Config, TextRoundTrip) {
  ExperimentConfig c = tiny_config();
  c.hyper.rule = optim::Rule::kNadam;
  c.hyper.epsilon = 1e-7;
  c.hyper.decay = 0.004;
  const ExperimentConfig back = parse_config(c.to_text());
  EXPECT_TRUE(back == c);
  EXPECT_EQ(back.hash(), c.hash());
}

TEST(Config, CommentsAndDefaults) {
  const ExperimentConfig c = parse_config("# comment\n\nrule = adam  \nalpha=0.001\n");
  EXPECT_EQ(c.hyper.rule, optim::Rule::kAdam);
  EXPECT_EQ(c.hyper.alpha, 0.001);
  EXPECT_EQ(c.widths, (std::vector<std::size_t>{256, 256, 256, 256, 256}));
  EXPECT_EQ(c.total_iterations, 3000u);
}

TEST(Config, Errors) {
  EXPECT_THROW(parse_config("learning_rate = 0.1\n"), ConfigError);
  EXPECT_THROW(parse_config("alpha = 0.1\nalpha = 0.2\n"), ConfigError);
  EXPECT_THROW(parse_config("alpha = fast\n"), ConfigError);
  EXPECT_THROW(parse_config("no equals sign\n"), ConfigError);
  EXPECT_THROW(parse_config("total_iterations = 10\nsnapshot_iterations = 0,20\n"), ConfigError);
  EXPECT_THROW(parse_config("batch_size = 0\n"), ConfigError);
}

TEST(Config, HashChangesWithContent) {
  ExperimentConfig a = tiny_config();
  ExperimentConfig b = a;
  b.seed = 8;
  EXPECT_NE(a.hash(), b.hash());
  EXPECT_EQ(format_run_id(a.hash()).size(), 16u);
}

TEST(SweepSpec, Validation) {
  SweepSpec s{tiny_config(), SweepParam::kEpsilon, {}, 0};
  EXPECT_THROW(s.validate(), ConfigError);
  s.values = {1e-8, -1.0};
  EXPECT_THROW(s.validate(), ConfigError);
  s.values = {1e-8};
  EXPECT_NO_THROW(s.validate());
  EXPECT_EQ(s.measure_at(), 10u);
  EXPECT_EQ(parse_sweep_param("alpha"), SweepParam::kAlpha);
  EXPECT_THROW(parse_sweep_param("beta"), ConfigError);
}

TEST(MinMax, Normalization) {
  EXPECT_EQ(min_max_normalize({3.0}), (std::vector<double>{0.0}));
  EXPECT_EQ(min_max_normalize({2.0, 2.0}), (std::vector<double>{0.0, 0.0}));
  EXPECT_EQ(min_max_normalize({1.0, 3.0, 2.0}), (std::vector<double>{0.0, 1.0, 0.5}));
  const auto with_nan = min_max_normalize({1.0, NAN, 5.0});
  EXPECT_EQ(with_nan[0], 0.0);
  EXPECT_TRUE(std::isnan(with_nan[1]));
  EXPECT_EQ(with_nan[2], 1.0);
}

TEST(RunExperiment, ScheduleProducesOneCurvePerLayerAndSnapshot) {
  const RunRecord r = run_experiment(tiny_config());
  EXPECT_EQ(r.loss.size(), 10u);
  EXPECT_EQ(r.curves.size(), 2u * 3u);
  EXPECT_EQ(r.moments.size(), 2u * 3u);
  for (std::size_t layer : {1u, 2u, 3u}) {
    for (std::size_t it : {0u, 10u}) {
      ASSERT_NE(r.curve(layer, it), nullptr);
      EXPECT_EQ(r.curve(layer, it)->values.size(), 5u);
      EXPECT_EQ(r.curve(layer, it)->values.front(), 1.0);
      ASSERT_NE(r.moment(layer, it), nullptr);
    }
  }
  EXPECT_EQ(r.curve(1, 5), nullptr);
}

TEST(RunExperiment, InitOnlyRun) {
  ExperimentConfig c = tiny_config();
  c.total_iterations = 0;
  c.snapshot_iterations = {0};
  const RunRecord r = run_experiment(c);
  EXPECT_TRUE(r.loss.empty());
  EXPECT_EQ(r.curves.size(), 3u);
}

TEST(RunExperiment, ZeroSumProbesKillBounds) {
  const RunRecord r = run_experiment(tiny_config());
  for (const MomentRow& m : r.moments) {
    EXPECT_LE(std::abs(m.lx_mean), 1e-10);
    EXPECT_LE(m.bound_i2, 1e-10);
    EXPECT_LE(m.bound_i4, 1e-10);
  }
}

TEST(RunExperiment, DivergenceIsReported) {
  ExperimentConfig c = tiny_config();
  c.hyper.alpha = 1e300;
  c.total_iterations = 50;
  c.snapshot_iterations = {0};
  EXPECT_THROW(run_experiment(c), DivergenceError);
}

TEST(RunExperiment, OutputsAreByteIdentical) {
  const fs::path a = fresh_dir("kinv_det_a");
  const fs::path b = fresh_dir("kinv_det_b");
  write_records({run_experiment(tiny_config())}, a);
  write_records({run_experiment(tiny_config())}, b);
  for (const char* name : {"kernel_curves.csv", "moments.csv", "loss.csv", "meta.csv",
                           "params_final.bin"}) {
    ASSERT_TRUE(fs::exists(a / name)) << name;
    EXPECT_EQ(slurp(a / name), slurp(b / name)) << name;
  }
}

TEST(RunExperiment, CsvHeaders) {
  const fs::path dir = fresh_dir("kinv_headers");
  write_records({run_experiment(tiny_config())}, dir);
  const auto first_line = [&](const char* name) {
    std::ifstream in(dir / name);
    std::string line;
    std::getline(in, line);
    return line;
  };
  EXPECT_EQ(first_line("kernel_curves.csv"), "run_id,layer,iteration,theta,cos_empirical,n_pairs");
  EXPECT_EQ(first_line("moments.csv"),
            "run_id,layer,iteration,v,c,delta_w,L_x_mean,L_y_mean,bound_i2,bound_i4");
  EXPECT_EQ(first_line("loss.csv"), "run_id,iteration,loss");
  EXPECT_EQ(first_line("meta.csv"), "run_id,seed,rng_algorithm,config_hash");
}

TEST(RunSweep, SingletonNormalizesToZero) {
  const SweepSpec s{tiny_config(), SweepParam::kAlpha, {0.01}, 0};
  const SweepResult r = run_sweep(s);
  ASSERT_EQ(r.rows.size(), 3u);
  for (const SweepRow& row : r.rows) {
    EXPECT_EQ(row.delta_k_norm, 0.0);
    EXPECT_EQ(row.delta_w_norm, 0.0);
    EXPECT_FALSE(row.diverged);
  }
}

TEST(RunSweep, MembersGetDistinctSeedsAndValues) {
  const SweepSpec s{tiny_config(), SweepParam::kEpsilon, {1e-8, 1.0}, 0};
  const ExperimentConfig m0 = sweep_member(s, 0);
  const ExperimentConfig m1 = sweep_member(s, 1);
  EXPECT_EQ(m0.hyper.epsilon, 1e-8);
  EXPECT_EQ(m1.hyper.epsilon, 1.0);
  EXPECT_NE(m0.seed, m1.seed);
}

TEST(RunSweep, DivergedMemberIsFlagged) {
  ExperimentConfig base = tiny_config();
  base.total_iterations = 50;
  base.snapshot_iterations = {0};
  const SweepSpec s{base, SweepParam::kAlpha, {0.01, 1e300}, 0};
  const SweepResult r = run_sweep(s);
  bool saw_flag = false;
  for (const SweepRow& row : r.rows) {
    if (row.value == 1e300) {
      EXPECT_TRUE(row.diverged);
      EXPECT_TRUE(std::isnan(row.delta_k));
      saw_flag = true;
    } else {
      EXPECT_FALSE(row.diverged);
      EXPECT_EQ(row.delta_k_norm, 0.0);
    }
  }
  EXPECT_TRUE(saw_flag);
}

TEST(RunSweep, ThreadCountDoesNotChangeResults) {
  const SweepSpec s{tiny_config(), SweepParam::kEpsilon, {1e-8, 1e-2, 1.0}, 0};
  ::setenv("KINV_THREADS", "1", 1);
  const SweepResult serial = run_sweep(s);
  ::setenv("KINV_THREADS", "3", 1);
  const SweepResult parallel = run_sweep(s);
  ::unsetenv("KINV_THREADS");
  ASSERT_EQ(serial.rows.size(), parallel.rows.size());
  for (std::size_t i = 0; i < serial.rows.size(); ++i) {
    EXPECT_EQ(serial.rows[i].delta_k, parallel.rows[i].delta_k);
    EXPECT_EQ(serial.rows[i].delta_w, parallel.rows[i].delta_w);
  }
}

TEST(InitKernel, SmallRunIsDeterministic) {
  InitKernelSpec spec;
  spec.width = 64;
  spec.input_dim = 16;
  spec.pairs = 4;
  spec.grid = 5;
  const auto a = run_init_kernel(spec);
  const auto b = run_init_kernel(spec);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.values.front(), 1.0);
  spec.dist = "cauchy";
  EXPECT_THROW(run_init_kernel(spec), Error);
}

}  // namespace
}  // namespace kinv::harness
