#include "qdisk/qdisk.h"

#include <string>

#include "qdisk/classical.hpp"
#include "qdisk/config.hpp"
#include "qdisk/io.hpp"
#include "qdisk/modes.hpp"
#include "qdisk/numerics.hpp"
#include "qdisk/suites.hpp"
#include "qdisk/weights.hpp"

struct qdisk_weights {
  qdisk::WeightSequence ws;
};

struct qdisk_config {
  qdisk::RunConfig config;
};

namespace {

thread_local std::string last_error;

struct NullArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

template <class T>
T* require(T* p, const char* name) {
  if (!p) throw NullArgument(std::string("null argument: ") + name);
  return p;
}

template <class Fn>
qdisk_status guarded(Fn&& fn) noexcept {
  try {
    fn();
    last_error.clear();
    return QDISK_OK;
  } catch (const NullArgument& e) {
    last_error = e.what();
    return QDISK_ERROR_NULL_ARGUMENT;
  } catch (const qdisk::ConfigError& e) {
    last_error = e.what();
    return QDISK_ERROR_CONFIG;
  } catch (const qdisk::PreconditionError& e) {
    last_error = e.what();
    return QDISK_ERROR_PRECONDITION;
  } catch (const qdisk::IoError& e) {
    last_error = e.what();
    return QDISK_ERROR_IO;
  } catch (const std::exception& e) {
    last_error = e.what();
    return QDISK_ERROR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return QDISK_ERROR_INTERNAL;
  }
}

qdisk::Variant to_variant(qdisk_variant v) {
  if (v == QDISK_UNBALANCED) return qdisk::Variant::unbalanced;
  if (v == QDISK_BALANCED) return qdisk::Variant::balanced;
  throw qdisk::ConfigError("unknown variant");
}

qdisk::ModeVector to_mode_vector(const int64_t* k, const double* re, const double* im, size_t count) {
  qdisk::ModeVector g;
  if (count == 0) return g;
  require(k, "k");
  require(re, "re");
  require(im, "im");
  for (size_t i = 0; i < count; ++i) g.set(k[i], g(k[i]) + qdisk::cplx(re[i], im[i]));
  return g;
}

void store(const qdisk::WindowedVector& v, double* out_re, double* out_im) {
  require(out_re, "out_re");
  require(out_im, "out_im");
  for (size_t i = 0; i < v.values.size(); ++i) {
    out_re[i] = v.values[i].real();
    out_im[i] = v.values[i].imag();
  }
}

}  // namespace

extern "C" {

const char* qdisk_version(void) { return "0.1.0"; }

const char* qdisk_last_error(void) { return last_error.c_str(); }

const char* qdisk_status_string(qdisk_status status) {
  switch (status) {
    case QDISK_OK: return "ok";
    case QDISK_ERROR_CONFIG: return "configuration error";
    case QDISK_ERROR_PRECONDITION: return "precondition violated";
    case QDISK_ERROR_IO: return "i/o error";
    case QDISK_ERROR_NULL_ARGUMENT: return "null argument";
    case QDISK_ERROR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

qdisk_status qdisk_weights_create(const char* family, double w_plus, double tau, qdisk_weights** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    switch (qdisk::parse_weight_family(require(family, "family"))) {
      case qdisk::WeightFamily::logistic:
        *out = new qdisk_weights{qdisk::WeightSequence::logistic(w_plus, tau)};
        break;
      case qdisk::WeightFamily::arctan:
        *out = new qdisk_weights{qdisk::WeightSequence::arctan(w_plus, tau)};
        break;
      case qdisk::WeightFamily::piecewise_exponential:
        *out = new qdisk_weights{qdisk::WeightSequence::piecewise_exponential(w_plus, tau)};
        break;
      case qdisk::WeightFamily::user_table:
        throw qdisk::ConfigError("use qdisk_weights_create_table for user tables");
    }
  });
}

qdisk_status qdisk_weights_create_table(const int64_t* k, const double* w, size_t count, double w_plus,
                                        const char* tail_rule, qdisk_weights** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    std::map<qdisk::Index, double> table;
    if (count > 0) {
      require(k, "k");
      require(w, "w");
    }
    for (size_t i = 0; i < count; ++i) {
      if (!table.emplace(k[i], w[i]).second) throw qdisk::ConfigError("duplicate table key");
    }
    const qdisk::TailRule rule = tail_rule ? qdisk::parse_tail_rule(tail_rule) : qdisk::TailRule::reject;
    *out = new qdisk_weights{qdisk::WeightSequence::from_table(std::move(table), w_plus, rule)};
  });
}

void qdisk_weights_destroy(qdisk_weights* weights) { delete weights; }

qdisk_status qdisk_weights_coefficient(const qdisk_weights* weights, qdisk_coefficient which, int64_t n, int64_t k,
                                       double* out) {
  return guarded([&] {
    const qdisk::WeightSequence& ws = require(weights, "weights")->ws;
    require(out, "out");
    switch (which) {
      case QDISK_COEFF_W: *out = qdisk::w_eval(ws, k); return;
      case QDISK_COEFF_S: *out = qdisk::S_eval(ws, k); return;
      case QDISK_COEFF_A: *out = qdisk::a_eval(ws, k); return;
      case QDISK_COEFF_C: *out = qdisk::c_eval(ws, n, k); return;
      case QDISK_COEFF_A_BALANCED: *out = qdisk::a_balanced_eval(ws, n, k); return;
      case QDISK_COEFF_R: *out = qdisk::kernel_R(ws, n, k); return;
    }
    throw qdisk::ConfigError("unknown coefficient");
  });
}

qdisk_status qdisk_trace_partial(const qdisk_weights* weights, int64_t K, double* value, double* tail_bound) {
  return guarded([&] {
    const qdisk::PartialTrace t = qdisk::trace_S_partial(require(weights, "weights")->ws, K);
    *require(value, "value") = t.value;
    if (tail_bound) *tail_bound = t.tail_bound;
  });
}

qdisk_status qdisk_validate(const qdisk_weights* weights, int64_t k_min, int64_t k_max, int* pass,
                            int* failed_condition, double* empirical_sup_ratio) {
  return guarded([&] {
    const qdisk::WeightValidation v =
        qdisk::validate_weights(require(weights, "weights")->ws, qdisk::TruncationWindow(k_min, k_max));
    *require(pass, "pass") = v.pass ? 1 : 0;
    if (failed_condition) {
      *failed_condition = 0;
      for (const auto& c : v.conditions) {
        if (!c.pass) {
          *failed_condition = c.id;
          break;
        }
      }
    }
    if (empirical_sup_ratio) *empirical_sup_ratio = v.empirical_sup_ratio;
  });
}

qdisk_status qdisk_apply_A(const qdisk_weights* weights, qdisk_variant variant, int64_t n, const int64_t* k,
                           const double* re, const double* im, size_t count, int64_t k_min, int64_t k_max,
                           double* out_re, double* out_im) {
  return guarded([&] {
    const qdisk::WeightSequence& ws = require(weights, "weights")->ws;
    const qdisk::TruncationWindow window(k_min, k_max);
    const qdisk::ModeVector ag = qdisk::apply_A_variant(ws, n, to_variant(variant), to_mode_vector(k, re, im, count));
    qdisk::WindowedVector v(window);
    for (const auto& [idx, value] : ag.entries()) {
      if (!window.contains(idx)) throw qdisk::PreconditionError("output window does not cover the support of A g");
      v.at(idx) = value;
    }
    store(v, out_re, out_im);
  });
}

qdisk_status qdisk_apply_Q(const qdisk_weights* weights, qdisk_variant variant, int64_t n, const int64_t* k,
                           const double* re, const double* im, size_t count, int64_t k_min, int64_t k_max,
                           double* out_re, double* out_im) {
  return guarded([&] {
    const qdisk::WeightSequence& ws = require(weights, "weights")->ws;
    const qdisk::WindowedVector v = qdisk::apply_Q_variant(ws, n, to_variant(variant), to_mode_vector(k, re, im, count),
                                                           qdisk::TruncationWindow(k_min, k_max));
    store(v, out_re, out_im);
  });
}

qdisk_status qdisk_norm(const qdisk_weights* weights, qdisk_variant variant, int64_t n, const int64_t* k,
                        const double* re, const double* im, size_t count, double* out) {
  return guarded([&] {
    *require(out, "out") = qdisk::variant_norm(require(weights, "weights")->ws, n, to_variant(variant),
                                               to_mode_vector(k, re, im, count));
  });
}

qdisk_status qdisk_residual_inverse(const qdisk_weights* weights, qdisk_variant variant, int64_t n, const int64_t* k,
                                    const double* re, const double* im, size_t count, int64_t k_min, int64_t k_max,
                                    double* right, double* left, double* g_norm) {
  return guarded([&] {
    const qdisk::ModeVector g = to_mode_vector(k, re, im, count);
    if (g.empty()) throw qdisk::PreconditionError("residual_inverse needs a non-empty input");
    const qdisk::InverseResiduals r = qdisk::residual_inverse(require(weights, "weights")->ws, n, g,
                                                              qdisk::TruncationWindow(k_min, k_max), to_variant(variant));
    *require(right, "right") = r.right;
    *require(left, "left") = r.left;
    if (g_norm) *g_norm = r.g_norm;
  });
}

qdisk_status qdisk_operator_norm(const qdisk_weights* weights, qdisk_variant variant, int64_t n, qdisk_operator op,
                                 int64_t k_min, int64_t k_max, qdisk_norm_method method, double tol, double* value,
                                 int* iterations, int* converged) {
  return guarded([&] {
    qdisk::OperatorKind kind = qdisk::OperatorKind::Q;
    if (op == QDISK_OP_A) kind = qdisk::OperatorKind::A;
    else if (op == QDISK_OP_A0) kind = qdisk::OperatorKind::A0;
    else if (op != QDISK_OP_Q) throw qdisk::ConfigError("unknown operator");
    if (!(tol > 0.0)) throw qdisk::ConfigError("tolerance must be positive");
    const qdisk::ModeOperatorSpec spec{n, to_variant(variant), kind};
    spec.check();
    const qdisk::OperatorMatrix m =
        qdisk::assemble_matrix(require(weights, "weights")->ws, spec, qdisk::TruncationWindow(k_min, k_max));
    const qdisk::NormEstimate est =
        method == QDISK_NORM_POWER ? qdisk::operator_norm(m, tol) : qdisk::operator_norm_lanczos(m.entries, tol);
    *require(value, "value") = est.value;
    if (iterations) *iterations = est.iterations;
    if (converged) *converged = est.converged ? 1 : 0;
  });
}

qdisk_status qdisk_schur_young(const qdisk_weights* weights, qdisk_variant variant, int64_t n, int64_t k_min,
                               int64_t k_max, double* bound, double* tail) {
  return guarded([&] {
    const qdisk::SchurYoungBound sy = qdisk::schur_young_bound(require(weights, "weights")->ws, n, to_variant(variant),
                                                               qdisk::TruncationWindow(k_min, k_max));
    *require(bound, "bound") = sy.bound;
    if (tail) *tail = sy.tail;
  });
}

qdisk_status qdisk_classical_norm(int64_t n, double T, int64_t m, double* value) {
  return guarded([&] {
    *require(value, "value") = qdisk::classical_norm_estimate(n, qdisk::make_log_grid(T, m)).value;
  });
}

qdisk_status qdisk_config_create(qdisk_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = new qdisk_config{};
  });
}

qdisk_status qdisk_config_load(const char* path, qdisk_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    *out = new qdisk_config{qdisk::load_config(require(path, "path"))};
  });
}

qdisk_status qdisk_config_parse(const char* text, qdisk_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    *out = new qdisk_config{qdisk::parse_config(require(text, "text"))};
  });
}

qdisk_status qdisk_config_set(qdisk_config* config, const char* key, const char* value) {
  return guarded([&] {
    qdisk::set_config_value(require(config, "config")->config, require(key, "key"), require(value, "value"));
  });
}

void qdisk_config_destroy(qdisk_config* config) { delete config; }

qdisk_status qdisk_run_suite(const qdisk_config* config, const char* suite, int* exit_code) {
  // configuration problems become exit code 2 with the message kept for the caller
  std::string message;
  const qdisk_status status = guarded([&] {
    require(exit_code, "exit_code");
    require(config, "config");
    require(suite, "suite");
    try {
      *exit_code = qdisk::run_suite(suite, config->config).exit_code();
    } catch (const qdisk::ConfigError& e) {
      message = e.what();
    } catch (const qdisk::PreconditionError& e) {
      message = e.what();
    } catch (const qdisk::IoError& e) {
      message = e.what();
    }
    if (!message.empty()) *exit_code = qdisk::kExitConfig;
  });
  if (!message.empty()) last_error = message;
  return status;
}

}  // extern "C"
