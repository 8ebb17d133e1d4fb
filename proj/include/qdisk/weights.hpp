#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qdisk/types.hpp"

namespace qdisk {

enum class WeightFamily { logistic, arctan, piecewise_exponential, user_table };

/// How a user table is extended outside its key range.
enum class TailRule {
  reject,     ///< queries outside the table are precondition errors
  geometric,  ///< left tail w(k_lo) r^(k - k_lo), right tail w+ - d q^(k - k_hi)
};

const char* to_string(WeightFamily family);
WeightFamily parse_weight_family(const std::string& name);
TailRule parse_tail_rule(const std::string& name);

/// A strictly increasing bilateral weight sequence w(k) with w(k) -> 0 as
/// k -> -inf and w(k) -> w_plus as k -> +inf.
///
/// Besides w(k) itself every family provides cancellation-free closed forms
/// for w(k)^2 - w(k-1)^2, w_plus^2 - w(k)^2 and their logarithms. Near
/// saturation w(k) and w(k+1) round to the same double, so monotonicity and
/// the coefficients a(k) = w(k)^2 / S(k) must go through these forms.
///
/// Immutable after construction; all members are safe for concurrent use.
class WeightSequence {
 public:
  /// w(k)^2 = w_plus^2 / (1 + exp(-k / tau))
  static WeightSequence logistic(double w_plus = 1.0, double tau = 2.0);
  /// w(k)^2 = w_plus^2 (1/2 + arctan(k / tau) / pi)
  static WeightSequence arctan(double w_plus = 1.0, double tau = 2.0);
  /// w(k) = (w_plus / 2) exp(k / tau) for k < 0, w_plus (1 - exp(-k / tau) / 2) for k >= 0
  static WeightSequence piecewise_exponential(double w_plus = 1.0, double tau = 2.0);
  static WeightSequence from_table(std::map<Index, double> table, double w_plus,
                                   TailRule rule = TailRule::reject);

  WeightFamily family() const { return family_; }
  double w_plus() const { return w_plus_; }
  /// Shape parameter of the closed-form families (unused for tables).
  double tau() const { return tau_; }
  TailRule tail_rule() const { return tail_rule_; }
  const std::map<Index, double>& table() const { return table_; }

  double w(Index k) const;
  double log_w(Index k) const;
  double w_sq(Index k) const;
  /// w_plus^2 - w(k)^2
  double w_sq_deficit(Index k) const;
  /// S(k) = w(k)^2 - w(k-1)^2
  double S(Index k) const;
  double log_S(Index k) const;

  /// sup_k w(k)/w(k-1) when the family has a closed form for it.
  std::optional<double> analytic_sup_ratio() const;

  /// True when w(k) (and w(k-1)) can be evaluated.
  bool defined_at(Index k) const;

 private:
  WeightSequence(WeightFamily family, double w_plus, double tau)
      : family_(family), w_plus_(w_plus), tau_(tau) {}

  double table_w(Index k) const;
  double table_log_w(Index k) const;

  WeightFamily family_;
  double w_plus_;
  double tau_;
  TailRule tail_rule_ = TailRule::reject;
  std::map<Index, double> table_;
  // geometric extension constants
  double left_ratio_ = 0.0;
  double right_ratio_ = 0.0;
};

/// Coefficient evaluators derived from a weight sequence.
class DerivedCoefficients {
 public:
  explicit DerivedCoefficients(const WeightSequence& ws) : ws_(&ws) {}
  // holds a pointer; the sequence must outlive this object
  explicit DerivedCoefficients(WeightSequence&&) = delete;

  double S(Index k) const { return ws_->S(k); }
  /// a(k) = w(k)^2 / S(k)
  double a(Index k) const;
  /// c^(n)(k) = w(k+n) / w(k)
  double c(Index n, Index k) const;
  double log_c(Index n, Index k) const;
  /// a^(n)(k) = w(k) w(k+n) / sqrt(S(k) S(k+n))
  double a_balanced(Index n, Index k) const;
  /// 1 / a(k) = S(k) / w(k)^2, the weight of index k in the unbalanced norm.
  double measure(Index k) const;
  double log_measure(Index k) const;
  /// 1 / a^(n)(k)
  double measure_balanced(Index n, Index k) const;

 private:
  const WeightSequence* ws_;
};

double w_eval(const WeightSequence& ws, Index k);
double S_eval(const WeightSequence& ws, Index k);
double c_eval(const WeightSequence& ws, Index n, Index k);
double a_eval(const WeightSequence& ws, Index k);
double a_balanced_eval(const WeightSequence& ws, Index n, Index k);

struct PartialTrace {
  double value;       ///< sum of S(k) over |k| <= K
  double tail_bound;  ///< w(-K-1)^2 + (w_plus^2 - w(K)^2)
};

/// Partial trace of the commutator diagonal; the full trace equals w_plus^2.
PartialTrace trace_S_partial(const WeightSequence& ws, Index K);

struct ConditionCheck {
  int id;  ///< 1..4
  std::string name;
  bool pass;
  std::optional<Index> offending_k;
  std::string detail;
};

struct WeightValidation {
  bool pass;
  std::vector<ConditionCheck> conditions;
  double empirical_sup_ratio;
  std::optional<double> analytic_sup_ratio;
};

/// Numerical check of the four admissibility conditions over a window.
/// Condition 3 (w -> 0) is tested as w(k_min) < 1e-3 w_plus.
WeightValidation validate_weights(const WeightSequence& ws, const TruncationWindow& window);

/// max w(k)/w(k-1) over k in the window.
double empirical_sup_ratio(const WeightSequence& ws, const TruncationWindow& window);

/// Analytic supremum when available, otherwise the window maximum.
double sup_ratio(const WeightSequence& ws, const TruncationWindow& window);

}  // namespace qdisk
