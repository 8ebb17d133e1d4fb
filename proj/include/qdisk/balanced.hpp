#pragma once

#include "qdisk/modes.hpp"
#include "qdisk/numerics.hpp"

namespace qdisk {

/// Norm weights of the balanced Hilbert space for mode n:
/// k -> sqrt(S(k) S(k+n)) / (w(k) w(k+n)) = 1 / a^(n)(k).
class BalancedNormWeights {
 public:
  BalancedNormWeights(const WeightSequence& ws, Index n) : coeff_(ws), n_(n) {}
  double operator()(Index k) const { return coeff_.measure_balanced(n_, k); }
  Index n() const { return n_; }

 private:
  DerivedCoefficients coeff_;
  Index n_;
};

ModeVector apply_A_balanced(const WeightSequence& ws, Index n, const ModeVector& g);
WindowedVector apply_Q_balanced(const WeightSequence& ws, Index n, const ModeVector& g,
                                const TruncationWindow& window);
double balanced_norm(const WeightSequence& ws, Index n, const ModeVector& g);

/// The two sums in the balanced Schur-Young estimate at one index:
///   sigma1(k) = sum_l |K(k,l)| sqrt(S(l)S(l+n)) / (w(l) w(l+n))   (row)
///   sigma2(l) = sum_k |K(k,l)| sqrt(S(k)S(k+n)) / (w(k) w(k+n))   (column)
/// Each is the window part plus an analytic bound on the rest.
struct SigmaSums {
  double sigma1;
  double sigma2;
  double tail1;
  double tail2;
};

SigmaSums sigma_sums(const WeightSequence& ws, Index n, Index index, const TruncationWindow& window);

struct SigmaSup {
  double sigma1;  ///< max over the window of sigma1(k), tails included
  double sigma2;
};

SigmaSup sigma_sup(const WeightSequence& ws, Index n, const TruncationWindow& window);

/// Window-only Cauchy-Schwarz majorant of sigma1(k):
/// sqrt(sum_l |K| S(l)/w(l)^2) * sqrt(sum_l |K| S(l+n)/w(l+n)^2).
double sigma1_cauchy_schwarz(const WeightSequence& ws, Index n, Index k, const TruncationWindow& window);
/// Window-only sigma1(k) (no tail), for comparison with the majorant.
double sigma1_window(const WeightSequence& ws, Index n, Index k, const TruncationWindow& window);

}  // namespace qdisk
