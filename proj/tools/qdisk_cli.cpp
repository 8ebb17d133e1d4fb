// Batch front end. Exit codes: 0 pass, 1 failed check, 2 configuration
// error, 3 inconclusive (non-converged estimate).

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qdisk/qdisk.h"

namespace {

constexpr int kExitConfig = 2;

int fail_config(const std::string& what) {
  std::cerr << "qdisk: " << what << '\n';
  return kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verification batches for mode-wise parametrices of weighted-shift Dirac operators"};
  app.set_version_flag("--version", std::string(qdisk_version()));
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "run configuration file (key = value lines)");
  app.add_option("--out", out_dir, "output directory for CSV and JSON reports");
  app.add_option("--seed", seed, "seed for random inputs");

  const char* help[] = {
      "check the weight admissibility conditions",
      "check both inverse identities on random inputs",
      "compare truncated parametrix norms with their bounds",
      "classical-disk parametrix norms and ODE residuals",
      "kernel elements: norm divergence and boundary limits",
      "residuals, norms and balanced sums across modes",
  };
  const char* names[] = {"validate", "invert", "bounds", "classical", "kernels", "sweep"};
  for (int i = 0; i < 6; ++i) app.add_subcommand(names[i], help[i]);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }
  const std::string suite = app.get_subcommands().front()->get_name();

  qdisk_config* config = nullptr;
  const qdisk_status loaded =
      config_path.empty() ? qdisk_config_create(&config) : qdisk_config_load(config_path.c_str(), &config);
  if (loaded != QDISK_OK) return fail_config(qdisk_last_error());

  int exit_code = kExitConfig;
  if (!out_dir.empty() && qdisk_config_set(config, "out", out_dir.c_str()) != QDISK_OK) {
    const int code = fail_config(qdisk_last_error());
    qdisk_config_destroy(config);
    return code;
  }
  if (seed && qdisk_config_set(config, "seed", std::to_string(*seed).c_str()) != QDISK_OK) {
    const int code = fail_config(qdisk_last_error());
    qdisk_config_destroy(config);
    return code;
  }

  const qdisk_status status = qdisk_run_suite(config, suite.c_str(), &exit_code);
  qdisk_config_destroy(config);
  if (status != QDISK_OK) {
    std::cerr << "qdisk " << suite << ": " << qdisk_status_string(status) << ": " << qdisk_last_error() << '\n';
    return kExitConfig;
  }
  switch (exit_code) {
    case 0: std::cerr << "qdisk " << suite << ": all checks passed\n"; break;
    case 1: std::cerr << "qdisk " << suite << ": some checks failed\n"; break;
    case 3: std::cerr << "qdisk " << suite << ": inconclusive, an estimate did not converge\n"; break;
    default: std::cerr << "qdisk " << suite << ": " << qdisk_last_error() << '\n'; break;
  }
  return exit_code;
}
