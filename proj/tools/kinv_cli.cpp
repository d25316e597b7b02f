// kinv: train ReLU MLP autoencoders and measure their layer-wise normalized
// kernels.
//
//   kinv init-kernel --width N --input-dim D --dist gengauss --alpha A --beta B
//                    --pairs P --grid G --out DIR
//   kinv train --config FILE --out DIR
//   kinv sweep --config FILE --param {epsilon|alpha} --values v1,v2,... --out DIR
//   kinv probe --params-snapshot FILE --op {moments|delta-w|perm-equivariance|ergodicity-gap}

#include <cstdio>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kinv/csv.hpp"
#include "kinv/data.hpp"
#include "kinv/error.hpp"
#include "kinv/harness.hpp"
#include "kinv/kernels.hpp"
#include "kinv/optim.hpp"
#include "kinv/probes.hpp"
#include "kinv/rng.hpp"
#include "kinv/snapshot.hpp"

namespace {

using kinv::csv::format_double;

std::vector<kinv::optim::Permutation> random_permutations(const kinv::mlp::MlpConfig& config,
                                                          kinv::Rng& rng) {
  std::vector<kinv::optim::Permutation> perms;
  for (std::size_t k = 1; k + 1 < config.widths.size(); ++k) {
    kinv::optim::Permutation p(config.widths[k]);
    std::iota(p.begin(), p.end(), std::size_t{0});
    for (std::size_t i = p.size(); i > 1; --i) {
      std::swap(p[i - 1], p[rng.index(i)]);
    }
    perms.push_back(std::move(p));
  }
  return perms;
}

int run_probe(const std::string& snapshot, const std::string& op, kinv::optim::Hyperparams hyper,
              const std::string& rule, std::uint64_t seed, std::size_t steps, std::size_t batch,
              std::size_t ensemble, std::size_t layer, double theta, bool zero_sum) {
  const kinv::mlp::Params params = kinv::mlp::load_params(snapshot);
  const kinv::mlp::MlpConfig config = params.config();
  hyper.rule = kinv::optim::parse_rule(rule);

  if (op == "moments") {
    std::cout << "layer,v,c,delta_w\n";
    for (std::size_t l = 0; l < params.depth(); ++l) {
      const auto r = kinv::probes::moment_report(params.weights[l], l + 1, 0);
      std::cout << l + 1 << ',' << format_double(r.v) << ',' << format_double(r.c) << ','
                << format_double(r.delta_w) << '\n';
    }
    return 0;
  }
  if (op == "delta-w") {
    std::cout << "layer,delta_w\n";
    for (std::size_t l = 0; l < params.depth(); ++l) {
      std::cout << l + 1 << ',' << format_double(kinv::probes::delta_w(params.weights[l])) << '\n';
    }
    return 0;
  }

  const kinv::Rng root(seed);
  kinv::Rng data_rng = root.split(1);
  const auto dataset = kinv::data::synthetic(std::max<std::size_t>(batch, 1024),
                                             config.widths.front(), data_rng, 0.5);
  if (op == "perm-equivariance") {
    kinv::Rng perm_rng = root.split(2);
    kinv::Rng batch_rng = root.split(3);
    const auto perms = random_permutations(config, perm_rng);
    const auto minibatch = kinv::optim::sample_minibatch(dataset.samples, batch, batch_rng);
    const double dev = kinv::optim::permutation_deviation(
        params, perms, minibatch, steps, kinv::optim::autoencoder_trainer(hyper));
    std::cout << "rule,steps,max_rel_dev\n"
              << kinv::optim::to_string(hyper.rule) << ',' << steps << ',' << format_double(dev)
              << '\n';
    return 0;
  }
  if (op == "ergodicity-gap") {
    if (layer < 1 || layer > config.depth() || config.widths[layer - 1] != config.widths.front()) {
      throw kinv::ParameterError("ergodicity-gap: layer input width must equal the input width");
    }
    kinv::Rng probe_rng = root.split(4);
    const auto probe = kinv::kernels::sample_probe_pair(dataset, theta, zero_sum, probe_rng);
    kinv::probes::ErgodicityOptions options;
    options.layer = layer;
    options.batch_size = batch;
    options.training_data = &dataset.samples;
    const auto report =
        kinv::probes::ergodicity_gap(config, hyper, steps, ensemble, probe, seed, options);
    std::cout << "layer,K,n,within,ensemble,gap,envelope,within_envelope\n"
              << layer << ',' << ensemble << ',' << config.widths[layer] << ','
              << format_double(report.within) << ',' << format_double(report.ensemble) << ','
              << format_double(report.gap) << ',' << format_double(report.envelope) << ','
              << (report.gap <= report.envelope ? "true" : "false") << '\n';
    return 0;
  }
  throw kinv::ParameterError("unknown probe op '" + op + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kernel-invariance experiments for ReLU MLP autoencoders"};
  app.require_subcommand(1);

  kinv::harness::InitKernelSpec init_spec;
  std::string init_out;
  auto* init = app.add_subcommand("init-kernel", "Normalized kernel of a random IID layer");
  init->add_option("--width", init_spec.width, "Layer width n")->required();
  init->add_option("--input-dim", init_spec.input_dim, "Input dimension d")->required();
  init->add_option("--dist", init_spec.dist, "Weight distribution")
      ->check(CLI::IsMember({"gaussian", "gengauss"}));
  init->add_option("--alpha", init_spec.alpha, "Scale parameter (stddev for gaussian)");
  init->add_option("--beta", init_spec.beta, "Shape parameter of the generalized Gaussian");
  init->add_option("--pairs", init_spec.pairs, "Probe pairs per grid point");
  init->add_option("--grid", init_spec.grid, "Number of theta grid points on [0, pi]");
  init->add_option("--seed", init_spec.seed, "Random seed");
  init->add_option("--out", init_out, "Output directory")->required();

  std::string train_config;
  std::string train_out;
  auto* train = app.add_subcommand("train", "Train one autoencoder and record kernels");
  train->add_option("--config", train_config, "Config file (key = value lines)")->required();
  train->add_option("--out", train_out, "Output directory")->required();

  std::string sweep_config;
  std::string sweep_param;
  std::string sweep_values;
  std::string sweep_out;
  std::size_t sweep_measure = 0;
  auto* sweep = app.add_subcommand("sweep", "Sweep epsilon or alpha and report dk / dW");
  sweep->add_option("--config", sweep_config, "Base config file")->required();
  sweep->add_option("--param", sweep_param, "Swept hyperparameter")
      ->required()
      ->check(CLI::IsMember({"epsilon", "alpha"}));
  sweep->add_option("--values", sweep_values, "Comma-separated values")->required();
  sweep->add_option("--measure-at", sweep_measure, "Measurement iteration (default: last)");
  sweep->add_option("--out", sweep_out, "Output directory")->required();

  std::string probe_snapshot;
  std::string probe_op;
  std::string probe_rule = "sgd";
  kinv::optim::Hyperparams probe_hyper;
  std::uint64_t probe_seed = 1;
  std::size_t probe_steps = 1;
  std::size_t probe_batch = 64;
  std::size_t probe_ensemble = 64;
  std::size_t probe_layer = 2;
  double probe_theta = 1.0;
  bool probe_zero_sum = true;
  auto* probe = app.add_subcommand("probe", "Statistics of a saved parameter snapshot");
  probe->add_option("--params-snapshot", probe_snapshot, "params_final.bin from train")->required();
  probe->add_option("--op", probe_op, "Probe to run")
      ->required()
      ->check(CLI::IsMember({"moments", "delta-w", "perm-equivariance", "ergodicity-gap"}));
  probe->add_option("--rule", probe_rule, "Optimizer rule: sgd, adam, rmsprop, nadam");
  probe->add_option("--alpha", probe_hyper.alpha, "Step size");
  probe->add_option("--epsilon", probe_hyper.epsilon, "Optimizer epsilon");
  probe->add_option("--seed", probe_seed, "Random seed");
  probe->add_option("--steps", probe_steps, "Training steps");
  probe->add_option("--batch", probe_batch, "Minibatch size");
  probe->add_option("--ensemble", probe_ensemble, "Ensemble size K (ergodicity-gap)");
  probe->add_option("--layer", probe_layer, "1-based weight layer (ergodicity-gap)");
  probe->add_option("--theta", probe_theta, "Probe angle (ergodicity-gap)");
  probe->add_option("--zero-sum", probe_zero_sum, "Zero-sum probe pair (ergodicity-gap)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*init) {
      const auto curve = kinv::harness::run_init_kernel(init_spec);
      kinv::harness::write_init_kernel(init_spec, curve, init_out);
      std::cout << "sup_deviation," << format_double(kinv::kernels::sup_deviation(curve)) << '\n'
                << "delta_k," << format_double(kinv::kernels::delta_k(curve)) << '\n';
    } else if (*train) {
      const auto config = kinv::harness::load_config(train_config);
      const auto record = kinv::harness::run_experiment(config);
      kinv::harness::write_records({record}, train_out);
      std::cout << "run_id," << record.run_id << '\n';
      for (const auto& c : record.curves) {
        std::cout << "layer," << c.layer << ",iteration," << c.iteration << ",delta_k,"
                  << format_double(kinv::kernels::delta_k(c)) << '\n';
      }
    } else if (*sweep) {
      kinv::harness::SweepSpec spec;
      spec.base = kinv::harness::load_config(sweep_config);
      spec.param = kinv::harness::parse_sweep_param(sweep_param);
      spec.values = kinv::harness::parse_double_list(sweep_values);
      spec.measurement_iteration = sweep_measure;
      const auto result = kinv::harness::run_sweep(spec);
      kinv::harness::write_sweep(result, sweep_out);
      std::cout << "param_value,layer,delta_k,delta_k_norm,delta_w,delta_w_norm\n";
      for (const auto& r : result.rows) {
        std::cout << format_double(r.value) << ',' << r.layer << ',' << format_double(r.delta_k)
                  << ',' << format_double(r.delta_k_norm) << ',' << format_double(r.delta_w)
                  << ',' << format_double(r.delta_w_norm) << (r.diverged ? ",diverged" : "")
                  << '\n';
      }
    } else if (*probe) {
      return run_probe(probe_snapshot, probe_op, probe_hyper, probe_rule, probe_seed, probe_steps,
                       probe_batch, probe_ensemble, probe_layer, probe_theta, probe_zero_sum);
    }
  } catch (const kinv::DivergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const kinv::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
