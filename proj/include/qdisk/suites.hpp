#pragma once

#include <limits>
#include <string>
#include <vector>

#include "qdisk/config.hpp"

namespace qdisk {

/// Tally of one suite run. A failed check outranks an inconclusive one.
struct SuiteOutcome {
  std::string suite;
  int pass_count = 0;
  int fail_count = 0;
  int inconclusive_count = 0;
  double worst_margin = std::numeric_limits<double>::infinity();

  int exit_code() const { return fail_count > 0 ? 1 : inconclusive_count > 0 ? 3 : 0; }
};

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitInconclusive = 3;

// Each suite writes <out>/<suite>.csv and <out>/<suite>_summary.json.
SuiteOutcome run_validate(const RunConfig& config);
SuiteOutcome run_invert(const RunConfig& config);
SuiteOutcome run_bounds(const RunConfig& config);
SuiteOutcome run_classical(const RunConfig& config);
SuiteOutcome run_kernels(const RunConfig& config);
SuiteOutcome run_sweep(const RunConfig& config);

const std::vector<std::string>& suite_names();

/// Dispatches by name; throws ConfigError for an unknown suite.
SuiteOutcome run_suite(const std::string& name, const RunConfig& config);

/// Worker count for concurrent modes: QDISK_THREADS if set, otherwise the
/// hardware concurrency.
unsigned thread_limit();

}  // namespace qdisk
