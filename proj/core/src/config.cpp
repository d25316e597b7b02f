#include "kinv/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <type_traits>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "kinv/csv.hpp"
#include "kinv/error.hpp"

namespace kinv::harness {

namespace {

std::string_view trim(std::string_view s) {
  const auto not_space = [](char c) { return c != ' ' && c != '\t' && c != '\r' && c != '\n'; };
  while (!s.empty() && !not_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && !not_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_commas(std::string_view text) {
  std::vector<std::string_view> parts;
  text = trim(text);
  if (text.empty()) {
    return parts;
  }
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = text.find(',', start);
    parts.push_back(trim(text.substr(start, comma - start)));
    if (comma == std::string_view::npos) {
      break;
    }
    start = comma + 1;
  }
  return parts;
}

double to_double(std::string_view s, std::string_view key) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw ConfigError("config: '" + std::string(key) + "' expects a number, got '" +
                      std::string(s) + "'");
  }
  return v;
}

std::uint64_t to_u64(std::string_view s, std::string_view key) {
  s = trim(s);
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw ConfigError("config: '" + std::string(key) + "' expects a nonnegative integer, got '" +
                      std::string(s) + "'");
  }
  return v;
}

bool to_bool(std::string_view s, std::string_view key) {
  s = trim(s);
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ConfigError("config: '" + std::string(key) + "' expects true or false");
}

template <typename T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ",";
    if constexpr (std::is_floating_point_v<T>) {
      out += csv::format_double(values[i]);
    } else {
      out += std::to_string(values[i]);
    }
  }
  return out;
}

}  // namespace

std::vector<double> parse_double_list(std::string_view text) {
  std::vector<double> out;
  for (auto part : split_commas(text)) {
    out.push_back(to_double(part, "list"));
  }
  return out;
}

std::vector<std::size_t> parse_size_list(std::string_view text) {
  std::vector<std::size_t> out;
  for (auto part : split_commas(text)) {
    out.push_back(static_cast<std::size_t>(to_u64(part, "list")));
  }
  return out;
}

void ExperimentConfig::validate() const {
  if (dataset_source != "synthetic" && dataset_source != "idx" && dataset_source != "cifar10") {
    throw ConfigError("config: dataset_source must be synthetic, idx or cifar10");
  }
  if (dataset_source != "synthetic" && dataset_path.empty()) {
    throw ConfigError("config: dataset_path is required for " + dataset_source);
  }
  if (dataset_source == "synthetic" && (synthetic_n < 1 || synthetic_d < 4)) {
    throw ConfigError("config: synthetic data needs synthetic_n >= 1 and synthetic_d >= 4");
  }
  if (!(synthetic_zero_fraction >= 0.0 && synthetic_zero_fraction < 1.0)) {
    throw ConfigError("config: synthetic_zero_fraction must lie in [0, 1)");
  }
  try {
    mlp::MlpConfig{widths}.validate();
    hyper.validate();
  } catch (const ParameterError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (widths.front() != widths.back()) {
    throw ConfigError("config: autoencoder needs widths to start and end with the same size");
  }
  if (batch_size < 1) {
    throw ConfigError("config: batch_size must be >= 1");
  }
  for (std::size_t s : snapshot_iterations) {
    if (s > total_iterations) {
      throw ConfigError("config: snapshot iteration " + std::to_string(s) +
                        " exceeds total_iterations");
    }
  }
  if (theta_grid < 1) {
    throw ConfigError("config: theta_grid must be >= 1");
  }
  if (n_pairs < 1) {
    throw ConfigError("config: n_pairs must be >= 1");
  }
  const std::size_t depth = widths.size() - 1;
  for (std::size_t l : probed_layers) {
    if (l < 1 || l > depth) {
      throw ConfigError("config: probed layer " + std::to_string(l) + " outside [1, " +
                        std::to_string(depth) + "]");
    }
  }
}

std::string ExperimentConfig::to_text() const {
  std::ostringstream out;
  out << "dataset_source = " << dataset_source << '\n'
      << "dataset_path = " << dataset_path << '\n'
      << "dataset_labels_path = " << dataset_labels_path << '\n'
      << "synthetic_n = " << synthetic_n << '\n'
      << "synthetic_d = " << synthetic_d << '\n'
      << "synthetic_zero_fraction = " << csv::format_double(synthetic_zero_fraction) << '\n'
      << "widths = " << join(widths) << '\n'
      << "rule = " << optim::to_string(hyper.rule) << '\n'
      << "alpha = " << csv::format_double(hyper.alpha) << '\n'
      << "beta1 = " << csv::format_double(hyper.beta1) << '\n'
      << "beta2 = " << csv::format_double(hyper.beta2) << '\n'
      << "rho = " << csv::format_double(hyper.rho) << '\n'
      << "epsilon = " << csv::format_double(hyper.epsilon) << '\n'
      << "decay = " << csv::format_double(hyper.decay) << '\n'
      << "batch_size = " << batch_size << '\n'
      << "total_iterations = " << total_iterations << '\n'
      << "snapshot_iterations = " << join(snapshot_iterations) << '\n'
      << "theta_grid = " << theta_grid << '\n'
      << "n_pairs = " << n_pairs << '\n'
      << "zero_sum = " << (zero_sum ? "true" : "false") << '\n'
      << "probed_layers = " << join(probed_layers) << '\n'
      << "seed = " << seed << '\n';
  return out.str();
}

std::uint64_t ExperimentConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : to_text()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  return a.to_text() == b.to_text();
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig c;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (!seen.insert(std::string(key)).second) {
      throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" +
                        std::string(key) + "'");
    }

    if (key == "dataset_source") c.dataset_source = value;
    else if (key == "dataset_path") c.dataset_path = value;
    else if (key == "dataset_labels_path") c.dataset_labels_path = value;
    else if (key == "synthetic_n") c.synthetic_n = to_u64(value, key);
    else if (key == "synthetic_d") c.synthetic_d = to_u64(value, key);
    else if (key == "synthetic_zero_fraction") c.synthetic_zero_fraction = to_double(value, key);
    else if (key == "widths") c.widths = parse_size_list(value);
    else if (key == "rule") {
      try {
        c.hyper.rule = optim::parse_rule(value);
      } catch (const ParameterError& e) {
        throw ConfigError(std::string("config: ") + e.what());
      }
    }
    else if (key == "alpha") c.hyper.alpha = to_double(value, key);
    else if (key == "beta1") c.hyper.beta1 = to_double(value, key);
    else if (key == "beta2") c.hyper.beta2 = to_double(value, key);
    else if (key == "rho") c.hyper.rho = to_double(value, key);
    else if (key == "epsilon") c.hyper.epsilon = to_double(value, key);
    else if (key == "decay") c.hyper.decay = to_double(value, key);
    else if (key == "batch_size") c.batch_size = to_u64(value, key);
    else if (key == "total_iterations") c.total_iterations = to_u64(value, key);
    else if (key == "snapshot_iterations") c.snapshot_iterations = parse_size_list(value);
    else if (key == "theta_grid") c.theta_grid = to_u64(value, key);
    else if (key == "n_pairs") c.n_pairs = to_u64(value, key);
    else if (key == "zero_sum") c.zero_sum = to_bool(value, key);
    else if (key == "probed_layers") c.probed_layers = parse_size_list(value);
    else if (key == "seed") c.seed = to_u64(value, key);
    else {
      throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" +
                        std::string(key) + "'");
    }
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string_view to_string(SweepParam p) {
  return p == SweepParam::kEpsilon ? "epsilon" : "alpha";
}

SweepParam parse_sweep_param(std::string_view name) {
  if (name == "epsilon") return SweepParam::kEpsilon;
  if (name == "alpha") return SweepParam::kAlpha;
  throw ConfigError("sweep parameter must be epsilon or alpha, got '" + std::string(name) + "'");
}

void SweepSpec::validate() const {
  base.validate();
  if (values.empty()) {
    throw ConfigError("sweep: value list is empty");
  }
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ConfigError("sweep: values must be positive and finite");
    }
  }
  if (measure_at() > base.total_iterations) {
    throw ConfigError("sweep: measurement iteration exceeds total_iterations");
  }
}

}  // namespace kinv::harness
