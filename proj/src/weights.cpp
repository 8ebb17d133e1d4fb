#include "qdisk/weights.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "summation.hpp"

namespace qdisk {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLn2 = std::numbers::ln2;

// logistic sigma(x) = 1 / (1 + e^-x), stable on both sides
double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log(1 + e^y)
double softplus(double y) {
  if (y > 0) return y + std::log1p(std::exp(-y));
  return std::log1p(std::exp(y));
}

double log_cosh(double z) {
  const double a = std::abs(z);
  return a + std::log1p(std::exp(-2.0 * a)) - kLn2;
}

// 1/2 + arctan(x)/pi and its complement, without cancellation in the tails
double arctan_cdf(double x) {
  if (x < 0) return std::atan(-1.0 / x) / kPi;
  return 0.5 + std::atan(x) / kPi;
}

double arctan_ccdf(double x) {
  if (x > 0) return std::atan(1.0 / x) / kPi;
  return 0.5 + std::atan(-x) / kPi;
}

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    std::ostringstream os;
    os << what << " must be a positive finite number, got " << value;
    throw ConfigError(os.str());
  }
}

}  // namespace

const char* to_string(WeightFamily family) {
  switch (family) {
    case WeightFamily::logistic: return "logistic";
    case WeightFamily::arctan: return "arctan";
    case WeightFamily::piecewise_exponential: return "piecewise-exponential";
    case WeightFamily::user_table: return "user-table";
  }
  return "unknown";
}

WeightFamily parse_weight_family(const std::string& name) {
  if (name == "logistic") return WeightFamily::logistic;
  if (name == "arctan") return WeightFamily::arctan;
  if (name == "piecewise-exponential" || name == "piecewise_exponential" || name == "piecewise")
    return WeightFamily::piecewise_exponential;
  if (name == "user-table" || name == "user_table" || name == "table") return WeightFamily::user_table;
  throw ConfigError("unknown weight family '" + name + "'");
}

TailRule parse_tail_rule(const std::string& name) {
  if (name == "reject") return TailRule::reject;
  if (name == "geometric") return TailRule::geometric;
  throw ConfigError("unknown tail rule '" + name + "'");
}

WeightSequence WeightSequence::logistic(double w_plus, double tau) {
  require_positive(w_plus, "w_plus");
  require_positive(tau, "tau");
  return WeightSequence(WeightFamily::logistic, w_plus, tau);
}

WeightSequence WeightSequence::arctan(double w_plus, double tau) {
  require_positive(w_plus, "w_plus");
  require_positive(tau, "tau");
  return WeightSequence(WeightFamily::arctan, w_plus, tau);
}

WeightSequence WeightSequence::piecewise_exponential(double w_plus, double tau) {
  require_positive(w_plus, "w_plus");
  require_positive(tau, "tau");
  return WeightSequence(WeightFamily::piecewise_exponential, w_plus, tau);
}

WeightSequence WeightSequence::from_table(std::map<Index, double> table, double w_plus, TailRule rule) {
  require_positive(w_plus, "w_plus");
  if (table.empty()) throw ConfigError("user-table family needs at least one entry");
  Index expected = table.begin()->first;
  for (const auto& [k, value] : table) {
    if (k != expected) throw ConfigError("user-table keys must be consecutive integers (gap before k=" + std::to_string(k) + ")");
    if (!std::isfinite(value)) throw ConfigError("user-table value at k=" + std::to_string(k) + " is not finite");
    ++expected;
  }

  WeightSequence ws(WeightFamily::user_table, w_plus, 0.0);
  ws.tail_rule_ = rule;
  ws.table_ = std::move(table);

  if (rule == TailRule::geometric) {
    if (ws.table_.size() < 2) throw ConfigError("geometric tail extension needs at least two table entries");
    const auto lo = ws.table_.begin();
    const auto hi = std::prev(ws.table_.end());
    const double w0 = lo->second;
    const double w1 = std::next(lo)->second;
    const double wn = hi->second;
    const double wn1 = std::prev(hi)->second;
    if (!(w0 > 0.0) || !(w1 > w0)) throw ConfigError("geometric tail: table must start positive and increasing");
    if (!(wn > wn1) || !(wn < w_plus)) throw ConfigError("geometric tail: table must end increasing and below w_plus");
    ws.left_ratio_ = w1 / w0;
    ws.right_ratio_ = (w_plus - wn) / (w_plus - wn1);
  }
  return ws;
}

bool WeightSequence::defined_at(Index k) const {
  if (family_ != WeightFamily::user_table || tail_rule_ == TailRule::geometric) return true;
  return table_.contains(k) && table_.contains(k - 1);
}

double WeightSequence::table_w(Index k) const {
  if (auto it = table_.find(k); it != table_.end()) return it->second;
  if (tail_rule_ == TailRule::reject) {
    throw PreconditionError("k=" + std::to_string(k) + " lies outside the user table [" +
                            std::to_string(table_.begin()->first) + ", " +
                            std::to_string(table_.rbegin()->first) + "] and the tail rule is 'reject'");
  }
  const auto& [k_lo, w_lo] = *table_.begin();
  const auto& [k_hi, w_hi] = *table_.rbegin();
  if (k < k_lo) return w_lo * std::pow(left_ratio_, static_cast<double>(k - k_lo));
  return w_plus_ - (w_plus_ - w_hi) * std::pow(right_ratio_, static_cast<double>(k - k_hi));
}

double WeightSequence::table_log_w(Index k) const {
  if (tail_rule_ == TailRule::geometric && k < table_.begin()->first) {
    const auto& [k_lo, w_lo] = *table_.begin();
    return std::log(w_lo) + static_cast<double>(k - k_lo) * std::log(left_ratio_);
  }
  return std::log(table_w(k));
}

double WeightSequence::w(Index k) const {
  const double x = static_cast<double>(k) / tau_;
  switch (family_) {
    case WeightFamily::logistic: {
      const double s = sigmoid(x);
      if (s > 1e-300) return w_plus_ * std::sqrt(s);
      return std::exp(log_w(k));
    }
    case WeightFamily::arctan:
      return w_plus_ * std::sqrt(arctan_cdf(x));
    case WeightFamily::piecewise_exponential:
      if (k < 0) return 0.5 * w_plus_ * std::exp(x);
      return w_plus_ * (1.0 - 0.5 * std::exp(-x));
    case WeightFamily::user_table:
      return table_w(k);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double WeightSequence::log_w(Index k) const {
  const double x = static_cast<double>(k) / tau_;
  switch (family_) {
    case WeightFamily::logistic:
      return std::log(w_plus_) - 0.5 * softplus(-x);
    case WeightFamily::arctan:
      return std::log(w_plus_) + 0.5 * std::log(arctan_cdf(x));
    case WeightFamily::piecewise_exponential:
      if (k < 0) return std::log(0.5 * w_plus_) + x;
      return std::log(w_plus_) + std::log1p(-0.5 * std::exp(-x));
    case WeightFamily::user_table:
      return table_log_w(k);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double WeightSequence::w_sq(Index k) const {
  const double x = static_cast<double>(k) / tau_;
  const double wp2 = w_plus_ * w_plus_;
  switch (family_) {
    case WeightFamily::logistic: return wp2 * sigmoid(x);
    case WeightFamily::arctan: return wp2 * arctan_cdf(x);
    default: {
      const double v = w(k);
      return v * v;
    }
  }
}

double WeightSequence::w_sq_deficit(Index k) const {
  const double x = static_cast<double>(k) / tau_;
  const double wp2 = w_plus_ * w_plus_;
  switch (family_) {
    case WeightFamily::logistic:
      return wp2 * sigmoid(-x);
    case WeightFamily::arctan:
      return wp2 * arctan_ccdf(x);
    case WeightFamily::piecewise_exponential: {
      if (k < 0) return wp2 - w_sq(k);
      const double e = std::exp(-x);
      return wp2 * (e - 0.25 * e * e);
    }
    case WeightFamily::user_table: {
      const double v = table_w(k);
      if (tail_rule_ == TailRule::geometric && k > table_.rbegin()->first) {
        const auto& [k_hi, w_hi] = *table_.rbegin();
        const double gap = (w_plus_ - w_hi) * std::pow(right_ratio_, static_cast<double>(k - k_hi));
        return gap * (w_plus_ + v);
      }
      return (w_plus_ - v) * (w_plus_ + v);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double WeightSequence::S(Index k) const {
  const double x = static_cast<double>(k) / tau_;
  const double wp2 = w_plus_ * w_plus_;
  switch (family_) {
    case WeightFamily::logistic: {
      // sigma(x) - sigma(y) = sinh((x-y)/2) / (2 cosh(x/2) cosh(y/2))
      const double delta = 1.0 / tau_;
      const double y = x - delta;
      if (std::abs(x) < 600.0) {
        return wp2 * std::sinh(0.5 * delta) / (2.0 * std::cosh(0.5 * x) * std::cosh(0.5 * y));
      }
      return std::exp(log_S(k));
    }
    case WeightFamily::arctan: {
      // arctan(x) - arctan(y) = arctan((x-y)/(1+xy)); xy >= 0 for integer k
      const double y = x - 1.0 / tau_;
      return wp2 * std::atan((1.0 / tau_) / (1.0 + x * y)) / kPi;
    }
    case WeightFamily::piecewise_exponential: {
      if (k <= 0) return 0.25 * wp2 * std::exp(2.0 * x) * -std::expm1(-2.0 / tau_);
      const double step = 0.5 * w_plus_ * std::exp(-x) * std::expm1(1.0 / tau_);
      return step * (w(k) + w(k - 1));
    }
    case WeightFamily::user_table: {
      const double cur = table_w(k);
      const double prev = table_w(k - 1);
      if (tail_rule_ == TailRule::geometric) {
        const Index k_lo = table_.begin()->first;
        const Index k_hi = table_.rbegin()->first;
        if (k <= k_lo) return prev * prev * (left_ratio_ * left_ratio_ - 1.0);
        if (k > k_hi) {
          const double gap_prev =
              (w_plus_ - table_.rbegin()->second) * std::pow(right_ratio_, static_cast<double>(k - 1 - k_hi));
          return gap_prev * (1.0 - right_ratio_) * (cur + prev);
        }
      }
      return (cur - prev) * (cur + prev);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double WeightSequence::log_S(Index k) const {
  const double x = static_cast<double>(k) / tau_;
  switch (family_) {
    case WeightFamily::logistic: {
      const double delta = 1.0 / tau_;
      const double y = x - delta;
      return 2.0 * std::log(w_plus_) + std::log(std::sinh(0.5 * delta)) - kLn2 - log_cosh(0.5 * x) -
             log_cosh(0.5 * y);
    }
    case WeightFamily::piecewise_exponential:
      if (k <= 0) return 2.0 * std::log(0.5 * w_plus_) + 2.0 * x + std::log(-std::expm1(-2.0 / tau_));
      // (w(k) - w(k-1)) (w(k) + w(k-1)) with the difference in closed form
      return std::log(0.5 * w_plus_) - x + std::log(std::expm1(1.0 / tau_)) + std::log(w(k) + w(k - 1));
    case WeightFamily::user_table:
      if (tail_rule_ == TailRule::geometric && k <= table_.begin()->first) {
        return 2.0 * table_log_w(k - 1) + std::log(left_ratio_ * left_ratio_ - 1.0);
      }
      return std::log(S(k));
    default:
      return std::log(S(k));
  }
}

std::optional<double> WeightSequence::analytic_sup_ratio() const {
  switch (family_) {
    // (1 + e^{-(k-1)/tau}) / (1 + e^{-k/tau}) increases to e^{1/tau} as k -> -inf
    case WeightFamily::logistic: return std::exp(0.5 / tau_);
    // attained on the whole left branch and at k = 0
    case WeightFamily::piecewise_exponential: return std::exp(1.0 / tau_);
    default: return std::nullopt;
  }
}

double DerivedCoefficients::a(Index k) const { return ws_->w_sq(k) / ws_->S(k); }

double DerivedCoefficients::c(Index n, Index k) const {
  if (n == 0) return 1.0;
  const double num = ws_->w(k + n);
  const double den = ws_->w(k);
  if (num > 1e-300 && den > 1e-300) return num / den;
  return std::exp(log_c(n, k));
}

double DerivedCoefficients::log_c(Index n, Index k) const {
  if (n == 0) return 0.0;
  return ws_->log_w(k + n) - ws_->log_w(k);
}

double DerivedCoefficients::a_balanced(Index n, Index k) const {
  if (n == 0) return a(k);
  return std::sqrt(a(k) * a(k + n));
}

double DerivedCoefficients::measure(Index k) const {
  const double w2 = ws_->w_sq(k);
  if (w2 > 1e-300) return ws_->S(k) / w2;
  return std::exp(log_measure(k));
}

double DerivedCoefficients::log_measure(Index k) const { return ws_->log_S(k) - 2.0 * ws_->log_w(k); }

double DerivedCoefficients::measure_balanced(Index n, Index k) const {
  if (n == 0) return measure(k);
  return std::sqrt(measure(k) * measure(k + n));
}

double w_eval(const WeightSequence& ws, Index k) { return ws.w(k); }
double S_eval(const WeightSequence& ws, Index k) { return ws.S(k); }
double c_eval(const WeightSequence& ws, Index n, Index k) { return DerivedCoefficients(ws).c(n, k); }
double a_eval(const WeightSequence& ws, Index k) { return DerivedCoefficients(ws).a(k); }
double a_balanced_eval(const WeightSequence& ws, Index n, Index k) {
  return DerivedCoefficients(ws).a_balanced(n, k);
}

PartialTrace trace_S_partial(const WeightSequence& ws, Index K) {
  if (K < 0) throw PreconditionError("trace_S_partial needs K >= 0");
  detail::NeumaierSum sum;
  for (Index k = -K; k <= K; ++k) sum.add(ws.S(k));
  return {sum.value(), ws.w_sq(-K - 1) + ws.w_sq_deficit(K)};
}

double empirical_sup_ratio(const WeightSequence& ws, const TruncationWindow& window) {
  double best = 0.0;
  for (Index k = window.k_min() + 1; k <= window.k_max(); ++k) {
    const double r = std::exp(ws.log_w(k) - ws.log_w(k - 1));
    if (!(r <= best)) best = r;  // propagates NaN
  }
  return best;
}

double sup_ratio(const WeightSequence& ws, const TruncationWindow& window) {
  if (auto analytic = ws.analytic_sup_ratio()) return *analytic;
  return empirical_sup_ratio(ws, window);
}

WeightValidation validate_weights(const WeightSequence& ws, const TruncationWindow& window) {
  if (!ws.defined_at(window.k_min()) || !ws.defined_at(window.k_max())) {
    throw PreconditionError("validation window [" + std::to_string(window.k_min()) + ", " +
                            std::to_string(window.k_max()) + "] leaves the user table");
  }

  WeightValidation report{true, {}, 0.0, ws.analytic_sup_ratio()};

  ConditionCheck monotone{1, "strictly increasing", true, std::nullopt, ""};
  for (Index k = window.k_min(); k <= window.k_max(); ++k) {
    if (!(ws.S(k) > 0.0)) {
      monotone.pass = false;
      monotone.offending_k = k;
      std::ostringstream os;
      os << "w(" << k << ") = " << ws.w(k) << " is not above w(" << k - 1 << ") = " << ws.w(k - 1);
      monotone.detail = os.str();
      break;
    }
  }

  ConditionCheck bounded{2, "bounded by w_plus", true, std::nullopt, ""};
  for (Index k = window.k_min(); k <= window.k_max(); ++k) {
    const double v = ws.w(k);
    if (!(v > 0.0) || !(ws.w_sq_deficit(k) > 0.0)) {
      bounded.pass = false;
      bounded.offending_k = k;
      std::ostringstream os;
      os << "w(" << k << ") = " << v << " is outside (0, " << ws.w_plus() << ")";
      bounded.detail = os.str();
      break;
    }
  }

  ConditionCheck vanishing{3, "vanishes at -infinity", true, std::nullopt, ""};
  {
    const double left = ws.w(window.k_min());
    const double threshold = 1e-3 * ws.w_plus();
    std::ostringstream os;
    os << "w(" << window.k_min() << ") = " << left << ", threshold " << threshold;
    vanishing.detail = os.str();
    if (!(left < threshold)) {
      vanishing.pass = false;
      vanishing.offending_k = window.k_min();
    }
  }

  ConditionCheck ratio{4, "bounded consecutive ratios", true, std::nullopt, ""};
  {
    double best = 0.0;
    Index arg = window.k_min();
    for (Index k = window.k_min(); k <= window.k_max(); ++k) {
      const double r = std::exp(ws.log_w(k) - ws.log_w(k - 1));
      if (!(r <= best)) {
        best = r;
        arg = k;
      }
    }
    report.empirical_sup_ratio = best;
    std::ostringstream os;
    os << "empirical sup w(k)/w(k-1) = " << best;
    if (report.analytic_sup_ratio) os << ", analytic " << *report.analytic_sup_ratio;
    ratio.detail = os.str();
    const bool finite = std::isfinite(best);
    const bool within = !report.analytic_sup_ratio || best <= *report.analytic_sup_ratio * (1.0 + 1e-12);
    if (!finite || !within) {
      ratio.pass = false;
      ratio.offending_k = arg;
    }
  }

  report.conditions = {monotone, bounded, vanishing, ratio};
  for (const auto& c : report.conditions) report.pass = report.pass && c.pass;
  return report;
}

}  // namespace qdisk
