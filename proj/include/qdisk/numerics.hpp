#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qdisk/modes.hpp"
#include "qdisk/types.hpp"
#include "qdisk/weights.hpp"

namespace qdisk {

/// Dense matrix of a mode operator in the orthonormalized basis, so that
/// Euclidean singular values are operator norms in the weighted space:
/// entry (k, l) = mu(k)^{1/2} [Op delta_l](k) mu(l)^{-1/2}.
struct OperatorMatrix {
  TruncationWindow rows;
  TruncationWindow cols;
  Eigen::MatrixXd entries;
};

OperatorMatrix assemble_matrix(const WeightSequence& ws, const ModeOperatorSpec& spec,
                               const TruncationWindow& window);

struct NormEstimate {
  double value;
  int iterations;
  bool converged;
};

/// Largest singular value by power iteration on v -> M^T (M v), starting
/// from the normalized all-ones vector. Stops once successive estimates
/// agree to the relative tolerance; the result never exceeds the true
/// value (up to rounding).
NormEstimate operator_norm(const Eigen::MatrixXd& m, double tol, int max_iterations = 10000);
inline NormEstimate operator_norm(const OperatorMatrix& m, double tol, int max_iterations = 10000) {
  return operator_norm(m.entries, tol, max_iterations);
}

/// Same Krylov space as operator_norm (the power iterates of M^T M from the
/// all-ones start), with Rayleigh-Ritz extraction via Lanczos and full
/// reorthogonalization. Converges in far fewer steps when the top singular
/// values cluster.
NormEstimate operator_norm_lanczos(const Eigen::MatrixXd& m, double tol, int max_steps = -1);

enum class TailExponent { minus_half, minus_three_halves };
enum class TailSide {
  lower,  ///< integral over (0, w(edge)^2]: bounds sums over k <= edge
  upper,  ///< integral over [w(edge)^2, w_plus^2): bounds sums over k > edge
};

/// Closed-form integral of t^{-1/2} or t^{-3/2} that bounds the
/// corresponding S-weighted sum beyond a window edge.
double integral_tail(const WeightSequence& ws, TailExponent exponent, Index edge, TailSide side);

/// Row sums sum_l |K(k,l)| mu(l) and column sums sum_k |K(k,l)| mu(k) of a
/// parametrix kernel over the window, each with an analytic bound on the
/// part outside the window.
struct SchurYoungSums {
  TruncationWindow window;
  std::vector<double> rows;  ///< window part, per k
  std::vector<double> cols;  ///< window part, per l
  std::vector<double> row_tails;
  std::vector<double> col_tails;
};

SchurYoungSums schur_young_sums(const WeightSequence& ws, Index n, Variant variant, const TruncationWindow& window);

struct SchurYoungBound {
  double bound;    ///< sqrt(row_sup * col_sup)
  double tail;     ///< largest tail term used
  double row_sup;  ///< sup over k of row sum plus tail
  double col_sup;
};

SchurYoungBound schur_young_bound(const WeightSequence& ws, Index n, Variant variant, const TruncationWindow& window);

/// Proven uniform bound on ||Q^(n)||: 2 for n > 0 and 2 sup w(l)/w(l-1) for
/// n < 0 in the unbalanced norm; no closed constant exists for the balanced
/// norm.
std::optional<double> closed_form_bound(const WeightSequence& ws, Index n, Variant variant,
                                        const TruncationWindow& window);

struct BoundReport {
  Index n;
  Variant variant;
  TruncationWindow window;
  double norm_estimate;
  double schur_young_bound;
  std::optional<double> closed_form_bound;
  double tail_bound_used;
  bool converged;
  bool pass;
};

inline constexpr double kDominanceSlack = 1e-9;

enum class NormMethod { power, lanczos };

BoundReport make_bound_report(const WeightSequence& ws, Index n, Variant variant, const TruncationWindow& window,
                              NormMethod method = NormMethod::lanczos, double tol = 1e-13);

/// Direct-summation check of the three sum/integral comparisons for
/// decreasing f on (0, w_plus^2), over the window.
struct IntegralComparison {
  std::string name;  ///< "sum_above", "sum_below" or "sum_shifted"
  TailExponent exponent;
  /// min over probed edges of (rhs - lhs), or (lhs - rhs) for the lower bound,
  /// divided by max(1, rhs); the slack is applied on the same scale
  double worst_margin;
  Index worst_edge;
  bool pass;
};

std::vector<IntegralComparison> check_integral_comparisons(const WeightSequence& ws, const TruncationWindow& window,
                                                           double slack = kDominanceSlack);

}  // namespace qdisk
