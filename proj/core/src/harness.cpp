#include "kinv/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

#include "kinv/csv.hpp"
#include "kinv/error.hpp"
#include "kinv/parallel.hpp"
#include "kinv/rng.hpp"
#include "kinv/snapshot.hpp"

namespace kinv::harness {

namespace {

// Stream ids for generators split off the run seed.
constexpr std::uint64_t kDataStream = 1;
constexpr std::uint64_t kInitStream = 2;
constexpr std::uint64_t kBatchStream = 3;
constexpr std::uint64_t kProbeStreamBase = 1000;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

const kernels::KernelCurve* RunRecord::curve(std::size_t layer, std::size_t iteration) const {
  for (const auto& c : curves) {
    if (c.layer == layer && c.iteration == iteration) return &c;
  }
  return nullptr;
}

const MomentRow* RunRecord::moment(std::size_t layer, std::size_t iteration) const {
  for (const auto& m : moments) {
    if (m.report.layer == layer && m.report.iteration == iteration) return &m;
  }
  return nullptr;
}

std::string format_run_id(std::uint64_t config_hash) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(config_hash));
  return buf;
}

data::Dataset load_dataset(const ExperimentConfig& config) {
  config.validate();
  if (config.dataset_source == "idx") {
    return data::load_idx(config.dataset_path, config.dataset_labels_path);
  }
  if (config.dataset_source == "cifar10") {
    std::vector<std::filesystem::path> paths;
    for (const auto& p : [&] {
           std::vector<std::string> parts;
           std::string cur;
           for (char ch : config.dataset_path) {
             if (ch == ',') {
               parts.push_back(cur);
               cur.clear();
             } else if (ch != ' ') {
               cur += ch;
             }
           }
           if (!cur.empty()) parts.push_back(cur);
           return parts;
         }()) {
      paths.emplace_back(p);
    }
    return data::load_cifar10(paths);
  }
  Rng rng = Rng(config.seed).split(kDataStream);
  return data::synthetic(config.synthetic_n, config.synthetic_d, rng,
                         config.synthetic_zero_fraction);
}

RunRecord run_experiment(const ExperimentConfig& config) {
  const data::Dataset dataset = load_dataset(config);
  return run_experiment(config, dataset);
}

RunRecord run_experiment(const ExperimentConfig& config, const data::Dataset& dataset) {
  config.validate();
  data::validate(dataset);
  const mlp::MlpConfig net{config.widths};
  if (dataset.dim() != net.widths.front()) {
    throw ConfigError("dataset dimension " + std::to_string(dataset.dim()) +
                      " does not match input width " + std::to_string(net.widths.front()));
  }
  for (std::size_t layer : config.probed_layers) {
    if (net.widths[layer - 1] != dataset.dim()) {
      throw ConfigError("probed layer " + std::to_string(layer) + " has input width " +
                        std::to_string(net.widths[layer - 1]) +
                        "; probe pairs are fed directly and need width " +
                        std::to_string(dataset.dim()));
    }
  }

  RunRecord record;
  record.config = config;
  record.config_hash = config.hash();
  record.run_id = format_run_id(record.config_hash);
  record.seed = config.seed;
  record.loss.reserve(config.total_iterations);

  const Rng root(config.seed);
  Rng init_rng = root.split(kInitStream);
  Rng batch_rng = root.split(kBatchStream);
  mlp::Params params = mlp::init_he(net, init_rng);
  optim::OptState state = optim::OptState::zeros_like(params);

  const std::set<std::size_t> snapshots(config.snapshot_iterations.begin(),
                                        config.snapshot_iterations.end());
  const std::vector<double> grid = kernels::uniform_grid(config.theta_grid);

  auto take_snapshot = [&](std::size_t iteration) {
    for (std::size_t layer : config.probed_layers) {
      const Matrix& w = params.weights[layer - 1];
      Rng probe_rng = root.split(kProbeStreamBase + layer);
      kernels::KernelCurve curve =
          kernels::kernel_curve(w, dataset, grid, config.zero_sum, config.n_pairs, probe_rng);
      curve.layer = layer;
      curve.iteration = iteration;

      MomentRow row;
      row.report = probes::moment_report(w, layer, iteration);
      row.lx_mean = curve.lx_mean;
      row.ly_mean = curve.ly_mean;
      row.bound_i2 = probes::bound_i2(row.report.v, row.report.c, curve.ly_mean);
      row.bound_i4 = probes::bound_i4(row.report.c, curve.lx_mean, curve.ly_mean);
      record.curves.push_back(std::move(curve));
      record.moments.push_back(row);
    }
  };

  if (snapshots.contains(0)) {
    take_snapshot(0);
  }
  optim::train_autoencoder(params, state, config.hyper, dataset.samples, config.total_iterations,
                           config.batch_size, batch_rng, [&](std::size_t done, double loss) {
                             record.loss.push_back(loss);
                             if (snapshots.contains(done)) {
                               take_snapshot(done);
                             }
                           });
  record.final_params = std::move(params);
  return record;
}

void write_records(const std::vector<RunRecord>& records, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  csv::Writer curves(dir / "kernel_curves.csv",
                     {"run_id", "layer", "iteration", "theta", "cos_empirical", "n_pairs"});
  csv::Writer moments(dir / "moments.csv", {"run_id", "layer", "iteration", "v", "c", "delta_w",
                                            "L_x_mean", "L_y_mean", "bound_i2", "bound_i4"});
  csv::Writer loss(dir / "loss.csv", {"run_id", "iteration", "loss"});
  csv::Writer meta(dir / "meta.csv", {"run_id", "seed", "rng_algorithm", "config_hash"});

  for (const auto& r : records) {
    for (const auto& c : r.curves) {
      for (std::size_t g = 0; g < c.thetas.size(); ++g) {
        curves.row({r.run_id, std::uint64_t{c.layer}, std::uint64_t{c.iteration}, c.thetas[g],
                    c.values[g], std::uint64_t{c.n_pairs}});
      }
    }
    for (const auto& m : r.moments) {
      moments.row({r.run_id, std::uint64_t{m.report.layer}, std::uint64_t{m.report.iteration},
                   m.report.v, m.report.c, m.report.delta_w, m.lx_mean, m.ly_mean, m.bound_i2,
                   m.bound_i4});
    }
    for (std::size_t t = 0; t < r.loss.size(); ++t) {
      loss.row({r.run_id, std::uint64_t{t}, r.loss[t]});
    }
    meta.row({r.run_id, r.seed, Rng::kAlgorithm, format_run_id(r.config_hash)});
  }
  for (const auto& r : records) {
    if (r.final_params.depth() == 0) continue;
    const auto name = records.size() == 1 ? std::string("params_final.bin")
                                          : "params_final_" + r.run_id + ".bin";
    mlp::save_params(r.final_params, dir / name);
  }
}

std::vector<double> min_max_normalize(const std::vector<double>& values) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (double v : values) {
    if (std::isnan(v)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (std::isnan(values[i])) {
      out[i] = values[i];
    } else if (!(hi > lo)) {
      out[i] = 0.0;
    } else {
      out[i] = (values[i] - lo) / (hi - lo);
    }
  }
  return out;
}

ExperimentConfig sweep_member(const SweepSpec& sweep, std::size_t index) {
  ExperimentConfig c = sweep.base;
  const double v = sweep.values.at(index);
  if (sweep.param == SweepParam::kEpsilon) {
    c.hyper.epsilon = v;
  } else {
    c.hyper.alpha = v;
  }
  c.seed = derive_seed(sweep.base.seed, index);
  const std::size_t at = sweep.measure_at();
  if (std::find(c.snapshot_iterations.begin(), c.snapshot_iterations.end(), at) ==
      c.snapshot_iterations.end()) {
    c.snapshot_iterations.push_back(at);
    std::sort(c.snapshot_iterations.begin(), c.snapshot_iterations.end());
  }
  return c;
}

SweepResult run_sweep(const SweepSpec& sweep) {
  sweep.validate();
  const data::Dataset dataset = load_dataset(sweep.base);
  return run_sweep(sweep, dataset);
}

SweepResult run_sweep(const SweepSpec& sweep, const data::Dataset& dataset) {
  sweep.validate();
  const std::size_t n = sweep.values.size();
  std::vector<std::optional<RunRecord>> records(n);
  std::vector<std::optional<std::size_t>> diverged(n);
  parallel_for(n, [&](std::size_t i) {
    try {
      records[i] = run_experiment(sweep_member(sweep, i), dataset);
    } catch (const DivergenceError& e) {
      diverged[i] = e.iteration();
    }
  });

  const std::size_t at = sweep.measure_at();
  SweepResult result;
  for (std::size_t layer : sweep.base.probed_layers) {
    std::vector<SweepRow> rows;
    for (std::size_t i = 0; i < n; ++i) {
      const ExperimentConfig member = sweep_member(sweep, i);
      SweepRow row;
      row.run_id = format_run_id(member.hash());
      row.rule = member.hyper.rule;
      row.param = sweep.param;
      row.value = sweep.values[i];
      row.layer = layer;
      row.iteration = at;
      if (records[i]) {
        const auto* curve = records[i]->curve(layer, at);
        const auto* moment = records[i]->moment(layer, at);
        row.delta_k = kernels::delta_k(*curve);
        row.delta_w = moment->report.delta_w;
      } else {
        row.diverged = true;
        row.diverged_at = diverged[i];
        row.delta_k = kNaN;
        row.delta_w = kNaN;
      }
      rows.push_back(row);
    }
    std::vector<double> dk;
    std::vector<double> dw;
    for (const auto& r : rows) {
      dk.push_back(r.delta_k);
      dw.push_back(r.delta_w);
    }
    const auto dk_norm = min_max_normalize(dk);
    const auto dw_norm = min_max_normalize(dw);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      rows[i].delta_k_norm = dk_norm[i];
      rows[i].delta_w_norm = dw_norm[i];
      result.rows.push_back(rows[i]);
    }
  }
  for (auto& r : records) {
    if (r) result.records.push_back(std::move(*r));
  }
  return result;
}

void write_sweep(const SweepResult& result, const std::filesystem::path& dir) {
  write_records(result.records, dir);
  csv::Writer out(dir / "sweep.csv", {"run_id", "rule", "param_name", "param_value", "layer",
                                      "iteration", "delta_k", "delta_k_norm", "delta_w",
                                      "delta_w_norm"});
  for (const auto& r : result.rows) {
    out.row({r.run_id, optim::to_string(r.rule), to_string(r.param), r.value,
             std::uint64_t{r.layer}, std::uint64_t{r.iteration}, r.delta_k, r.delta_k_norm,
             r.delta_w, r.delta_w_norm});
  }
}

kernels::KernelCurve run_init_kernel(const InitKernelSpec& spec) {
  if (spec.width < 1 || spec.input_dim < 2) {
    throw ParameterError("init-kernel: need width >= 1 and input_dim >= 2");
  }
  const Rng root(spec.seed);
  Rng weight_rng = root.split(1);
  Rng probe_rng = root.split(2);
  Matrix w;
  if (spec.dist == "gaussian") {
    w = sample_gaussian(spec.width, spec.input_dim, spec.alpha, weight_rng);
  } else if (spec.dist == "gengauss") {
    w = sample_gen_gaussian(spec.width, spec.input_dim, spec.alpha, spec.beta, weight_rng);
  } else {
    throw ParameterError("init-kernel: dist must be gaussian or gengauss, got '" + spec.dist + "'");
  }
  const std::size_t d = spec.input_dim;
  kernels::PairSampler sampler = [d](double theta, Rng& r) {
    return kernels::orthonormal_probe_pair(d, theta, r);
  };
  const auto grid = kernels::uniform_grid(spec.grid);
  auto curve = kernels::kernel_curve(w, sampler, grid, spec.pairs, probe_rng);
  curve.layer = 1;
  curve.iteration = 0;
  return curve;
}

void write_init_kernel(const InitKernelSpec& spec, const kernels::KernelCurve& curve,
                       const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const std::string key = std::to_string(spec.width) + "|" + std::to_string(spec.input_dim) + "|" +
                          spec.dist + "|" + csv::format_double(spec.alpha) + "|" +
                          csv::format_double(spec.beta) + "|" + std::to_string(spec.pairs) + "|" +
                          std::to_string(spec.grid) + "|" + std::to_string(spec.seed);
  for (unsigned char c : key) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  const std::string run_id = format_run_id(h);
  csv::Writer curves(dir / "kernel_curves.csv",
                     {"run_id", "layer", "iteration", "theta", "cos_empirical", "n_pairs"});
  for (std::size_t g = 0; g < curve.thetas.size(); ++g) {
    curves.row({run_id, std::uint64_t{curve.layer}, std::uint64_t{curve.iteration},
                curve.thetas[g], curve.values[g], std::uint64_t{curve.n_pairs}});
  }
  csv::Writer meta(dir / "meta.csv", {"run_id", "seed", "rng_algorithm", "config_hash"});
  meta.row({run_id, spec.seed, Rng::kAlgorithm, run_id});
}

}  // namespace kinv::harness
