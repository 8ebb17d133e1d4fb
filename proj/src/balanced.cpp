#include "qdisk/balanced.hpp"

#include <algorithm>
#include <cmath>

#include "summation.hpp"

namespace qdisk {

ModeVector apply_A_balanced(const WeightSequence& ws, Index n, const ModeVector& g) {
  return apply_A_variant(ws, n, Variant::balanced, g);
}

WindowedVector apply_Q_balanced(const WeightSequence& ws, Index n, const ModeVector& g,
                                const TruncationWindow& window) {
  return apply_Q_variant(ws, n, Variant::balanced, g, window);
}

double balanced_norm(const WeightSequence& ws, Index n, const ModeVector& g) {
  return variant_norm(ws, n, Variant::balanced, g);
}

SigmaSums sigma_sums(const WeightSequence& ws, Index n, Index index, const TruncationWindow& window) {
  if (!window.contains(index)) throw PreconditionError("sigma_sums: index outside the window");
  // For n > 0 the roles mirror n < 0: rows sum over l < k instead of l >= k
  // and the first weight factor replaces the last one in the tail bounds.
  const SchurYoungSums sums = schur_young_sums(ws, n, Variant::balanced, window);
  const auto i = window.offset(index);
  return {sums.rows[i] + sums.row_tails[i], sums.cols[i] + sums.col_tails[i], sums.row_tails[i], sums.col_tails[i]};
}

SigmaSup sigma_sup(const WeightSequence& ws, Index n, const TruncationWindow& window) {
  const SchurYoungSums sums = schur_young_sums(ws, n, Variant::balanced, window);
  SigmaSup out{0.0, 0.0};
  for (std::size_t i = 0; i < sums.rows.size(); ++i) {
    out.sigma1 = detail::nan_max(out.sigma1, sums.rows[i] + sums.row_tails[i]);
    out.sigma2 = detail::nan_max(out.sigma2, sums.cols[i] + sums.col_tails[i]);
  }
  return out;
}

double sigma1_window(const WeightSequence& ws, Index n, Index k, const TruncationWindow& window) {
  const ModeKernel kernel(ws, n, Variant::balanced, window.k_min(), window.k_max());
  detail::NeumaierSum sum;
  for (Index l = window.k_min(); l <= window.k_max(); ++l) {
    if (kernel.couples(k, l)) sum.add(kernel.ratio(k, l) * kernel.measure(l));
  }
  return sum.value();
}

double sigma1_cauchy_schwarz(const WeightSequence& ws, Index n, Index k, const TruncationWindow& window) {
  const ModeKernel kernel(ws, n, Variant::unbalanced, window.k_min(), window.k_max());
  const DerivedCoefficients coeff(ws);
  detail::NeumaierSum plain;
  detail::NeumaierSum shifted;
  for (Index l = window.k_min(); l <= window.k_max(); ++l) {
    if (!kernel.couples(k, l)) continue;
    const double r = kernel.ratio(k, l);
    plain.add(r * kernel.measure(l));
    shifted.add(r * coeff.measure(l + n));
  }
  return std::sqrt(plain.value()) * std::sqrt(shifted.value());
}

}  // namespace qdisk
