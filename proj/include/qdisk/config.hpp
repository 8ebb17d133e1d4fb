#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qdisk/types.hpp"
#include "qdisk/weights.hpp"

namespace qdisk {

/// Batch-run settings, read from a flat `key = value` file. Lines starting
/// with '#' are comments. Unknown keys are errors.
struct RunConfig {
  // weights
  WeightFamily family = WeightFamily::logistic;
  double w_plus = 1.0;
  double tau = 2.0;
  std::filesystem::path table;  ///< CSV with columns k,w (user-table only)
  TailRule tail_rule = TailRule::reject;

  std::vector<Variant> variants = {Variant::unbalanced, Variant::balanced};
  Index n_min = -8;
  Index n_max = 8;
  Index k_min = -200;
  Index k_max = 200;

  // classical grid
  double grid_T = 20.0;
  Index grid_m = 2000;
  Index classical_n_max = 10;
  bool classical_refine = true;
  bool dump_matrices = false;

  // inverse identities
  Index samples = 50;
  Index support_radius = 10;
  Index residual_margin = 3;
  double residual_tol = 1e-12;
  std::filesystem::path input;  ///< optional mode vector CSV (k,re,im)

  // kernel claims
  Index kernel_K = 10000;
  double kernel_threshold = 1e3;
  double boundary_tol = 1e-8;

  // norm estimation
  std::string norm_method = "lanczos";
  double norm_tol = 1e-13;

  bool sweep_invert = true;
  bool sweep_bounds = true;

  std::filesystem::path out = "qdisk_out";
  std::uint64_t seed = 1;

  TruncationWindow window() const { return TruncationWindow(k_min, k_max); }

  /// Throws ConfigError when fields are inconsistent.
  void check() const;
};

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Applies one key/value pair; relative paths resolve against base_dir.
void set_config_value(RunConfig& config, const std::string& key, const std::string& value,
                      const std::filesystem::path& base_dir = {});

/// Builds the weight sequence the config describes (reads the table file).
WeightSequence make_weights(const RunConfig& config);

}  // namespace qdisk
