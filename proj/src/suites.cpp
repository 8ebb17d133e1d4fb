#include "qdisk/suites.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "qdisk/balanced.hpp"
#include "qdisk/classical.hpp"
#include "qdisk/io.hpp"
#include "qdisk/modes.hpp"
#include "qdisk/numerics.hpp"

namespace qdisk {

namespace {

class Tally {
 public:
  explicit Tally(std::string suite) { outcome_.suite = std::move(suite); }

  void record(bool pass, double margin, bool converged = true) {
    if (!converged) {
      ++outcome_.inconclusive_count;
      return;
    }
    pass ? ++outcome_.pass_count : ++outcome_.fail_count;
    if (std::isnan(margin)) return;
    outcome_.worst_margin = std::min(outcome_.worst_margin, margin);
  }

  const SuiteOutcome& outcome() const { return outcome_; }

 private:
  SuiteOutcome outcome_;
};

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& header) : path_(path), out_(path) {
    if (!out_) throw IoError("cannot write " + path.string());
    out_ << header << '\n';
  }

  template <class... Fields>
  void row(const Fields&... fields) {
    bool first = true;
    ((out_ << (first ? "" : ",") << field(fields), first = false), ...);
    out_ << '\n';
  }

 private:
  static std::string field(double x) { return format_double(x); }
  static std::string field(bool b) { return b ? "true" : "false"; }
  static std::string field(Index k) { return std::to_string(k); }
  static std::string field(int k) { return std::to_string(k); }
  static std::string field(const char* s) { return s; }
  static std::string field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char ch : s) {
      if (ch == '"') quoted += '"';
      quoted += ch;
    }
    return quoted + '"';
  }
  static std::string field(const std::optional<double>& x) { return x ? format_double(*x) : ""; }
  static std::string field(const std::optional<Index>& k) { return k ? std::to_string(*k) : ""; }

  std::filesystem::path path_;
  std::ofstream out_;
};

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_summary(const RunConfig& config, const SuiteOutcome& outcome, nlohmann::json extra = {}) {
  nlohmann::json j = {
      {"suite", outcome.suite},
      {"pass_count", outcome.pass_count},
      {"fail_count", outcome.fail_count},
      {"inconclusive_count", outcome.inconclusive_count},
      {"worst_margin", std::isfinite(outcome.worst_margin) ? nlohmann::json(outcome.worst_margin) : nlohmann::json()},
      {"exit_code", outcome.exit_code()},
      {"seed", config.seed},
      {"timestamp", utc_timestamp()},
  };
  if (extra.is_object()) j.update(extra);
  const auto path = config.out / (outcome.suite + "_summary.json");
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

std::filesystem::path prepare_output(const RunConfig& config, const std::string& suite) {
  std::error_code ec;
  std::filesystem::create_directories(config.out, ec);
  if (ec) throw IoError("cannot create output directory " + config.out.string() + ": " + ec.message());
  return config.out / (suite + ".csv");
}

// Runs fn(0..count-1) on up to thread_limit() workers. Results must be
// written by index so output order does not depend on scheduling.
template <class Fn>
void parallel_for(std::size_t count, Fn fn) {
  const std::size_t workers = std::min<std::size_t>(count, thread_limit());
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
  }
  if (error) std::rethrow_exception(error);
}

NormMethod norm_method(const RunConfig& config) {
  return config.norm_method == "power" ? NormMethod::power : NormMethod::lanczos;
}

struct ModeTask {
  Variant variant;
  Index n;
};

std::vector<ModeTask> mode_tasks(const RunConfig& config, bool skip_zero) {
  std::vector<ModeTask> tasks;
  for (Variant v : config.variants) {
    for (Index n = config.n_min; n <= config.n_max; ++n) {
      if (skip_zero && n == 0) continue;
      tasks.push_back({v, n});
    }
  }
  return tasks;
}

ModeVector random_input(const RunConfig& config, const ModeTask& task, Index sample) {
  const auto low = [](std::uint64_t x) { return static_cast<std::uint32_t>(x); };
  std::seed_seq seq{low(config.seed), low(config.seed >> 32), low(static_cast<std::uint64_t>(task.n)),
                    static_cast<std::uint32_t>(task.variant), low(static_cast<std::uint64_t>(sample))};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  std::bernoulli_distribution present(0.5);

  ModeVector g;
  const Index R = config.support_radius;
  for (Index k = -R; k <= R; ++k) {
    if (present(rng)) g.set(k, {value(rng), value(rng)});
  }
  if (g.empty()) g.set(0, {value(rng), value(rng)});
  return g;
}

struct ResidualRow {
  double right;
  double left;
  double g_norm;
};

ResidualRow relative_residuals(const WeightSequence& ws, const RunConfig& config, const ModeTask& task,
                               const ModeVector& g) {
  const Index m = config.residual_margin;
  const TruncationWindow window(g.support_min() - m, std::max(g.support_max(), g.support_min() + 1) + m);
  const InverseResiduals r = residual_inverse(ws, task.n, g, window, task.variant);
  return {r.right / r.g_norm, r.left / r.g_norm, r.g_norm};
}

TruncationWindow validation_window(const WeightSequence& ws, const RunConfig& config) {
  if (ws.family() != WeightFamily::user_table || ws.tail_rule() != TailRule::reject) return config.window();
  // S(k) needs w(k - 1), so the first table key only enters through k + 1.
  const Index lo = std::max(config.k_min, ws.table().begin()->first + 1);
  const Index hi = std::min(config.k_max, ws.table().rbegin()->first);
  if (lo >= hi) throw ConfigError("weight table does not overlap the configured window");
  return TruncationWindow(lo, hi);
}

void dump_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << format_double(m(i, j));
    out << '\n';
  }
}

}  // namespace

unsigned thread_limit() {
  if (const char* env = std::getenv("QDISK_THREADS"); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) throw ConfigError(std::string("QDISK_THREADS must be a positive integer, got '") + env + "'");
    return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

SuiteOutcome run_validate(const RunConfig& config) {
  const WeightSequence ws = make_weights(config);
  const TruncationWindow window = validation_window(ws, config);
  CsvWriter csv(prepare_output(config, "validate"), "check,name,pass,offending_k,margin,detail");
  Tally tally("validate");

  const WeightValidation report = validate_weights(ws, window);
  for (const ConditionCheck& c : report.conditions) {
    std::optional<double> margin;
    if (c.id == 3) margin = 1e-3 * ws.w_plus() - ws.w(window.k_min());
    if (c.id == 4 && report.analytic_sup_ratio) margin = *report.analytic_sup_ratio - report.empirical_sup_ratio;
    csv.row("condition_" + std::to_string(c.id), c.name, c.pass, c.offending_k, margin, c.detail);
    tally.record(c.pass, margin.value_or(std::nan("")));
    if (!c.pass) std::cerr << "validate: condition " << c.id << " (" << c.name << ") fails: " << c.detail << '\n';
  }

  // Trace identity and sum/integral comparisons need the closed families
  // or an extended table.
  if (ws.family() != WeightFamily::user_table || ws.tail_rule() == TailRule::geometric) {
    const Index K = std::min<Index>(100, std::min(-window.k_min(), window.k_max()));
    if (K >= 0) {
      const PartialTrace trace = trace_S_partial(ws, K);
      const double target = ws.w_plus() * ws.w_plus();
      const double gap = std::abs(trace.value - target);
      const double margin = trace.tail_bound + 4e-16 * target - gap;
      std::ostringstream detail;
      detail << "K = " << K << ", partial trace " << format_double(trace.value) << ", tail bound "
             << format_double(trace.tail_bound);
      csv.row(std::string("trace"), std::string("partial trace within tail bound"), margin >= 0.0,
              std::optional<Index>{}, std::optional<double>(margin), detail.str());
      tally.record(margin >= 0.0, margin);
    }
    if (report.conditions[0].pass && report.conditions[1].pass) {
      for (const IntegralComparison& ic : check_integral_comparisons(ws, window)) {
        const std::string f = ic.exponent == TailExponent::minus_half ? "t^-1/2" : "t^-3/2";
        csv.row(ic.name + "_" + (ic.exponent == TailExponent::minus_half ? "half" : "three_halves"),
                "sum against integral of " + f, ic.pass, std::optional<Index>(ic.worst_edge),
                std::optional<double>(ic.worst_margin), std::string("worst edge"));
        tally.record(ic.pass, ic.worst_margin);
      }
    }
  }

  write_summary(config, tally.outcome(),
                {{"family", to_string(ws.family())},
                 {"k_min", window.k_min()},
                 {"k_max", window.k_max()},
                 {"empirical_sup_ratio", report.empirical_sup_ratio}});
  return tally.outcome();
}

SuiteOutcome run_invert(const RunConfig& config) {
  const WeightSequence ws = make_weights(config);
  const auto tasks = mode_tasks(config, false);
  const auto samples = static_cast<std::size_t>(config.samples);
  std::vector<ResidualRow> rows(tasks.size() * samples);
  parallel_for(tasks.size(), [&](std::size_t t) {
    for (std::size_t s = 0; s < samples; ++s) {
      rows[t * samples + s] = relative_residuals(ws, config, tasks[t], random_input(config, tasks[t], static_cast<Index>(s)));
    }
  });

  CsvWriter csv(prepare_output(config, "invert"), "n,variant,sample,right,left,g_norm,pass");
  Tally tally("invert");
  auto emit = [&](const ModeTask& task, const std::string& sample, const ResidualRow& r) {
    const double worst = std::max(r.right, r.left);
    const bool pass = worst < config.residual_tol;
    csv.row(task.n, std::string(to_string(task.variant)), sample, r.right, r.left, r.g_norm, pass);
    tally.record(pass, config.residual_tol - worst);
  };
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    for (std::size_t s = 0; s < samples; ++s) emit(tasks[t], std::to_string(s), rows[t * samples + s]);
  }

  if (!config.input.empty()) {
    ModeVector g;
    try {
      g = read_mode_vector(config.input);
    } catch (const IoError& e) {
      throw ConfigError(e.what());
    }
    if (g.empty()) throw ConfigError("input mode vector is empty");
    const auto dir = config.out / "invert_q";
    std::filesystem::create_directories(dir);
    for (const ModeTask& task : tasks) {
      emit(task, "input", relative_residuals(ws, config, task, g));
      const TruncationWindow window(g.support_min() - config.residual_margin,
                                    g.support_max() + config.residual_margin);
      const WindowedVector q = apply_Q_variant(ws, task.n, task.variant, g, window);
      write_mode_vector(dir / (std::string(to_string(task.variant)) + "_n" + std::to_string(task.n) + ".csv"), q);
    }
  }

  write_summary(config, tally.outcome(), {{"tolerance", config.residual_tol}});
  return tally.outcome();
}

SuiteOutcome run_bounds(const RunConfig& config) {
  const WeightSequence ws = make_weights(config);
  const TruncationWindow window = config.window();
  const auto tasks = mode_tasks(config, true);
  std::vector<std::optional<BoundReport>> reports(tasks.size());
  parallel_for(tasks.size(), [&](std::size_t t) {
    reports[t] = make_bound_report(ws, tasks[t].n, tasks[t].variant, window, norm_method(config), config.norm_tol);
  });

  CsvWriter csv(prepare_output(config, "bounds"), "n,variant,k_min,k_max,norm,sy_bound,paper_bound,tail,pass");
  Tally tally("bounds");
  for (const auto& r : reports) {
    csv.row(r->n, std::string(to_string(r->variant)), window.k_min(), window.k_max(), r->norm_estimate,
            r->schur_young_bound, r->closed_form_bound, r->tail_bound_used, r->pass);
    const double limit = std::min(r->schur_young_bound, r->closed_form_bound.value_or(r->schur_young_bound));
    tally.record(r->pass, limit + kDominanceSlack - r->norm_estimate, r->converged);
    if (!r->converged) std::cerr << "bounds: norm estimate for n = " << r->n << " did not converge\n";
  }
  write_summary(config, tally.outcome(), {{"norm_method", config.norm_method}});
  return tally.outcome();
}

SuiteOutcome run_classical(const RunConfig& config) {
  const LogGrid grid = make_log_grid(config.grid_T, config.grid_m);
  std::vector<Index> modes;
  for (Index n = -config.classical_n_max; n <= config.classical_n_max; ++n) {
    if (n != 0) modes.push_back(n);
  }

  struct Row {
    ClassicalNorm norm;
    std::optional<double> refined;
    double residual[3];
  };
  std::vector<Row> rows(modes.size());
  const LogGrid fine = make_log_grid(config.grid_T, 2 * (config.grid_m - 1) + 1);
  const LogGrid finer = make_log_grid(config.grid_T, 4 * (config.grid_m - 1) + 1);
  parallel_for(modes.size(), [&](std::size_t i) {
    const Index n = modes[i];
    Row& row = rows[i];
    row.norm = classical_norm_estimate(n, grid);
    if (config.classical_refine && std::abs(n) == 1) row.refined = classical_norm_estimate(n, fine).value;
    const LogGrid* grids[3] = {&grid, &fine, &finer};
    for (int g = 0; g < 3; ++g) {
      const ClassicalModeFunction ones{std::vector<cplx>(static_cast<std::size_t>(grids[g]->m), 1.0)};
      row.residual[g] = classical_residual(n, ones, *grids[g]);
    }
    if (config.dump_matrices) {
      dump_matrix(config.out / ("classical_Q_n" + std::to_string(n) + ".csv"), classical_Q_matrix(n, grid).entries);
    }
  });

  CsvWriter csv(prepare_output(config, "classical"),
                "n,T,m,norm,lower,upper,n_times_norm,refined_norm,residual,residual_fine,residual_finer,order,pass");
  Tally tally("classical");
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const Index n = modes[i];
    const Row& row = rows[i];
    const double abs_n = std::abs(static_cast<double>(n));
    const double lower = 0.9 / abs_n;
    const double upper = 1.0 / abs_n + 1e-3;
    const double v = row.norm.value;
    const bool in_band = v >= lower && v <= upper;
    double margin = std::min(v - lower, upper - v);

    bool refined_ok = true;
    if (row.refined) {
      const double change = std::abs(*row.refined - v);
      refined_ok = change < 1e-4;
      margin = std::min(margin, 1e-4 - change);
    }
    // observed order from the two refinements; the coarser pair can still be
    // pre-asymptotic, so the finer one decides
    const double order = std::log2(row.residual[1] / row.residual[2]);
    const bool second_order = order > 1.8 && order < 2.2;
    margin = std::min(margin, 0.2 - std::abs(order - 2.0));

    const bool pass = in_band && refined_ok && second_order;
    csv.row(n, config.grid_T, grid.m, v, lower, upper, abs_n * v, row.refined, row.residual[0], row.residual[1],
            row.residual[2], order, pass);
    tally.record(pass, margin, row.norm.converged);
  }
  if (config.dump_matrices) {
    CsvWriter sv(config.out / "classical_singular_values.csv", "n,sigma_max");
    for (std::size_t i = 0; i < modes.size(); ++i) sv.row(modes[i], rows[i].norm.value);
  }
  write_summary(config, tally.outcome(), {{"T", config.grid_T}, {"m", grid.m}});
  return tally.outcome();
}

SuiteOutcome run_kernels(const RunConfig& config) {
  const WeightSequence ws = make_weights(config);
  CsvWriter csv(prepare_output(config, "kernels"), "n,check,K,value,threshold,pass");
  Tally tally("kernels");

  for (Index n = 0; n <= 3; ++n) {
    const std::vector<double> logs = kernel_log_partial_sums(ws, n, config.kernel_K);
    bool increasing = true;
    for (std::size_t j = 1; j < logs.size(); ++j) increasing = increasing && logs[j] > logs[j - 1];
    csv.row(n, std::string("partial_sums_increasing"), config.kernel_K, logs.back(), std::nan(""), increasing);
    tally.record(increasing, std::nan(""));

    const double log_threshold = std::log(config.kernel_threshold);
    const bool diverges = logs.back() > log_threshold;
    csv.row(n, std::string("log_partial_sum_exceeds"), config.kernel_K, logs.back(), log_threshold, diverges);
    tally.record(diverges, logs.back() - log_threshold);
  }

  // both checks concern the kernel element alone, so they use kernel_K rather
  // than the operator window
  const TruncationWindow right_half(0, config.kernel_K);
  for (Index n = -1; n >= -3; --n) {
    const BoundaryLimit limit = boundary_limit(kernel_R_window(ws, n, right_half));
    const double gap = std::abs(limit.value - cplx(1.0));
    const bool at_one = gap <= config.boundary_tol;
    csv.row(n, std::string("boundary_limit"), config.kernel_K, limit.value.real(), config.boundary_tol, at_one);
    tally.record(at_one, config.boundary_tol - gap, limit.converged);

    // the kernel element has finite norm, so only the boundary condition
    // keeps it out of the domain
    const Index K = config.kernel_K;
    const double norm = kernel_weighted_norm(ws, n, K);
    const double norm2 = kernel_weighted_norm(ws, n, 2 * K);
    const double drift = std::abs(norm2 - norm) / norm2;
    const bool stable = std::isfinite(norm2) && drift < 1e-10;
    csv.row(n, std::string("weighted_norm_stable"), 2 * K, norm2, 1e-10, stable);
    tally.record(stable, 1e-10 - drift);
  }
  write_summary(config, tally.outcome(), {{"kernel_K", config.kernel_K}});
  return tally.outcome();
}

SuiteOutcome run_sweep(const RunConfig& config) {
  const WeightSequence ws = make_weights(config);
  const TruncationWindow window = config.window();
  const auto tasks = mode_tasks(config, false);

  struct Row {
    double residual = std::nan("");
    std::optional<BoundReport> bound;
    std::optional<SigmaSup> sigma;
  };
  std::vector<Row> rows(tasks.size());
  parallel_for(tasks.size(), [&](std::size_t t) {
    const ModeTask& task = tasks[t];
    Row& row = rows[t];
    if (config.sweep_invert) {
      row.residual = 0.0;
      for (Index s = 0; s < config.samples; ++s) {
        const ResidualRow r = relative_residuals(ws, config, task, random_input(config, task, s));
        row.residual = std::max({row.residual, r.right, r.left});
      }
    }
    if (config.sweep_bounds && task.n != 0) {
      row.bound = make_bound_report(ws, task.n, task.variant, window, norm_method(config), config.norm_tol);
      if (task.variant == Variant::balanced) row.sigma = sigma_sup(ws, task.n, window);
    }
  });

  CsvWriter csv(prepare_output(config, "sweep"),
                "n,variant,residual,norm,sy_bound,paper_bound,abs_n_times_norm,sigma1,sigma2,pass");
  Tally tally("sweep");
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    const ModeTask& task = tasks[t];
    const Row& row = rows[t];
    bool pass = true;
    double margin = std::numeric_limits<double>::infinity();
    bool converged = true;
    if (config.sweep_invert) {
      pass = row.residual < config.residual_tol;
      margin = config.residual_tol - row.residual;
    }
    std::optional<double> norm, sy, uniform, scaled, s1, s2;
    if (row.bound) {
      const BoundReport& b = *row.bound;
      norm = b.norm_estimate;
      sy = b.schur_young_bound;
      uniform = b.closed_form_bound;
      scaled = std::abs(static_cast<double>(task.n)) * b.norm_estimate;
      pass = pass && b.pass;
      converged = b.converged;
      margin = std::min(margin, std::min(b.schur_young_bound, uniform.value_or(b.schur_young_bound)) +
                                    kDominanceSlack - b.norm_estimate);
    }
    if (row.sigma) {
      s1 = row.sigma->sigma1;
      s2 = row.sigma->sigma2;
      const bool finite = std::isfinite(row.sigma->sigma1) && std::isfinite(row.sigma->sigma2);
      pass = pass && finite;
    }
    csv.row(task.n, std::string(to_string(task.variant)),
            config.sweep_invert ? std::optional<double>(row.residual) : std::nullopt, norm, sy, uniform, scaled, s1, s2,
            pass);
    tally.record(pass, std::isfinite(margin) ? margin : std::nan(""), converged);
  }
  write_summary(config, tally.outcome(), {{"threads", thread_limit()}});
  return tally.outcome();
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"validate", "invert", "bounds", "classical", "kernels", "sweep"};
  return names;
}

SuiteOutcome run_suite(const std::string& name, const RunConfig& config) {
  config.check();
  if (name == "validate") return run_validate(config);
  if (name == "invert") return run_invert(config);
  if (name == "bounds") return run_bounds(config);
  if (name == "classical") return run_classical(config);
  if (name == "kernels") return run_kernels(config);
  if (name == "sweep") return run_sweep(config);
  throw ConfigError("unknown suite '" + name + "'");
}

}  // namespace qdisk
