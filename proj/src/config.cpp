#include "qdisk/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "qdisk/io.hpp"

namespace qdisk {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double x = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': not a number: '" + value + "'");
  }
}

Index to_index(const std::string& key, const std::string& value) {
  Index x = 0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, x);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("config key '" + key + "': not an integer: '" + value + "'");
  }
  return x;
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw ConfigError("config key '" + key + "': not a boolean: '" + value + "'");
}

std::filesystem::path resolve(const std::string& value, const std::filesystem::path& base_dir) {
  std::filesystem::path p(value);
  if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
  return p;
}

}  // namespace

void RunConfig::check() const {
  if (!(w_plus > 0.0) || !std::isfinite(w_plus)) throw ConfigError("w_plus must be positive");
  if (family != WeightFamily::user_table && (!(tau > 0.0) || !std::isfinite(tau))) {
    throw ConfigError("tau must be positive");
  }
  if (family == WeightFamily::user_table && table.empty()) {
    throw ConfigError("family user_table needs a 'table' file");
  }
  if (variants.empty()) throw ConfigError("no variant selected");
  if (n_min > n_max) throw ConfigError("n_min must not exceed n_max");
  (void)window();
  if (!(grid_T > 0.0)) throw ConfigError("grid_T must be positive");
  if (grid_m < 2) throw ConfigError("grid_m must be at least 2");
  if (classical_n_max < 1) throw ConfigError("classical_n_max must be at least 1");
  if (samples < 0) throw ConfigError("samples must be non-negative");
  if (support_radius < 0) throw ConfigError("support_radius must be non-negative");
  if (residual_margin < 2) throw ConfigError("residual_margin must be at least 2");
  if (!(residual_tol > 0.0)) throw ConfigError("residual_tol must be positive");
  if (kernel_K < 1) throw ConfigError("kernel_K must be positive");
  if (norm_method != "lanczos" && norm_method != "power") {
    throw ConfigError("norm_method must be 'lanczos' or 'power'");
  }
  if (!(norm_tol > 0.0)) throw ConfigError("norm_tol must be positive");
}

void set_config_value(RunConfig& c, const std::string& key, const std::string& value,
                      const std::filesystem::path& base_dir) {
  if (key == "family") {
    c.family = parse_weight_family(value);
  } else if (key == "w_plus") {
    c.w_plus = to_double(key, value);
  } else if (key == "tau") {
    c.tau = to_double(key, value);
  } else if (key == "table") {
    c.table = resolve(value, base_dir);
  } else if (key == "tail_rule") {
    c.tail_rule = parse_tail_rule(value);
  } else if (key == "variant") {
    if (value == "unbalanced") {
      c.variants = {Variant::unbalanced};
    } else if (value == "balanced") {
      c.variants = {Variant::balanced};
    } else if (value == "both") {
      c.variants = {Variant::unbalanced, Variant::balanced};
    } else {
      throw ConfigError("variant must be unbalanced, balanced or both");
    }
  } else if (key == "n_min") {
    c.n_min = to_index(key, value);
  } else if (key == "n_max") {
    c.n_max = to_index(key, value);
  } else if (key == "k_min") {
    c.k_min = to_index(key, value);
  } else if (key == "k_max") {
    c.k_max = to_index(key, value);
  } else if (key == "grid_T") {
    c.grid_T = to_double(key, value);
  } else if (key == "grid_m") {
    c.grid_m = to_index(key, value);
  } else if (key == "classical_n_max") {
    c.classical_n_max = to_index(key, value);
  } else if (key == "classical_refine") {
    c.classical_refine = to_bool(key, value);
  } else if (key == "dump_matrices") {
    c.dump_matrices = to_bool(key, value);
  } else if (key == "samples") {
    c.samples = to_index(key, value);
  } else if (key == "support_radius") {
    c.support_radius = to_index(key, value);
  } else if (key == "residual_margin") {
    c.residual_margin = to_index(key, value);
  } else if (key == "residual_tol") {
    c.residual_tol = to_double(key, value);
  } else if (key == "input") {
    c.input = resolve(value, base_dir);
  } else if (key == "kernel_K") {
    c.kernel_K = to_index(key, value);
  } else if (key == "kernel_threshold") {
    c.kernel_threshold = to_double(key, value);
  } else if (key == "boundary_tol") {
    c.boundary_tol = to_double(key, value);
  } else if (key == "norm_method") {
    c.norm_method = value;
  } else if (key == "norm_tol") {
    c.norm_tol = to_double(key, value);
  } else if (key == "sweep_invert") {
    c.sweep_invert = to_bool(key, value);
  } else if (key == "sweep_bounds") {
    c.sweep_bounds = to_bool(key, value);
  } else if (key == "out") {
    c.out = resolve(value, base_dir);
  } else if (key == "seed") {
    const Index s = to_index(key, value);
    if (s < 0) throw ConfigError("seed must be non-negative");
    c.seed = static_cast<std::uint64_t>(s);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  RunConfig config;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError("config line " + std::to_string(line_no) + ": empty key or value");
    }
    set_config_value(config, key, value, base_dir);
  }
  config.check();
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.parent_path());
}

WeightSequence make_weights(const RunConfig& c) {
  c.check();
  switch (c.family) {
    case WeightFamily::logistic:
      return WeightSequence::logistic(c.w_plus, c.tau);
    case WeightFamily::arctan:
      return WeightSequence::arctan(c.w_plus, c.tau);
    case WeightFamily::piecewise_exponential:
      return WeightSequence::piecewise_exponential(c.w_plus, c.tau);
    case WeightFamily::user_table:
      break;
  }
  std::map<Index, double> table;
  try {
    table = read_weight_table(c.table);
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
  return WeightSequence::from_table(std::move(table), c.w_plus, c.tail_rule);
}

}  // namespace qdisk
