#pragma once

#include <map>
#include <vector>

#include "qdisk/types.hpp"
#include "qdisk/weights.hpp"

namespace qdisk {

/// Finitely supported complex sequence over the integers; zero off support.
class ModeVector {
 public:
  ModeVector() = default;
  explicit ModeVector(std::map<Index, cplx> entries) : entries_(std::move(entries)) {}

  static ModeVector delta(Index k, cplx value = 1.0) { return ModeVector({{k, value}}); }

  cplx operator()(Index k) const {
    auto it = entries_.find(k);
    return it == entries_.end() ? cplx{} : it->second;
  }
  void set(Index k, cplx value) { entries_[k] = value; }

  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  Index support_min() const { return entries_.begin()->first; }
  Index support_max() const { return entries_.rbegin()->first; }
  const std::map<Index, cplx>& entries() const { return entries_; }

  ModeVector& operator+=(const ModeVector& other);
  ModeVector& operator*=(cplx s);
  friend ModeVector operator+(ModeVector a, const ModeVector& b) { return a += b; }
  friend ModeVector operator*(cplx s, ModeVector a) { return a *= s; }

 private:
  std::map<Index, cplx> entries_;
};

/// Dense values of a sequence over a truncation window.
struct WindowedVector {
  TruncationWindow window;
  std::vector<cplx> values;

  WindowedVector(TruncationWindow w) : window(w), values(static_cast<std::size_t>(w.width())) {}

  cplx& at(Index k) { return values[window.offset(k)]; }
  cplx at(Index k) const { return values[window.offset(k)]; }
};

enum class OperatorKind { A, A0, Q };

/// Selects one Fourier-mode operator. A0 (the A operator restricted to
/// sequences with vanishing limit at +infinity) only exists for n <= 0.
struct ModeOperatorSpec {
  Index n;
  Variant variant = Variant::unbalanced;
  OperatorKind kind = OperatorKind::Q;

  void check() const {
    if (kind == OperatorKind::A0 && n > 0) throw ConfigError("A0 operators only exist for n <= 0");
  }
};

/// Shared summation-kernel engine for the parametrices of one mode.
///
/// Both variants invert A g(k) = alpha(k) (g(k) - c(k) g(k+1)) with the same
/// weight-ratio kernel; they differ only in the measure mu = 1/alpha:
///
///   n >= 0:  Q g(k) = -sum_{l < k}  exp(L(l) - L(k)) mu(l) g(l)
///   n <  0:  Q g(k) =  sum_{l >= k} exp(L(l) - L(k)) mu(l) g(l)
///
/// with L(k) = sum_{j=0}^{n-1} log w(k+j) for n > 0 and
/// L(k) = -sum_{j=n}^{-1} log w(k+j) for n < 0 (L = 0 for n = 0). Products
/// of weight ratios therefore never leave log space.
class ModeKernel {
 public:
  ModeKernel(const WeightSequence& ws, Index n, Variant variant, Index lo, Index hi);

  Index n() const { return n_; }
  Index lo() const { return lo_; }
  Index hi() const { return hi_; }
  Variant variant() const { return variant_; }

  double log_product(Index k) const { return log_product_[idx(k)]; }
  double measure(Index k) const { return measure_[idx(k)]; }
  bool couples(Index k, Index l) const { return n_ >= 0 ? l < k : l >= k; }
  double sign() const { return n_ >= 0 ? -1.0 : 1.0; }
  /// Weight ratio exp(L(l) - L(k)); at most one on the coupled set.
  double ratio(Index k, Index l) const { return std::exp(log_product(l) - log_product(k)); }
  /// Signed kernel against the measure, zero off the coupled set.
  double kernel(Index k, Index l) const { return couples(k, l) ? sign() * ratio(k, l) : 0.0; }

 private:
  std::size_t idx(Index k) const { return static_cast<std::size_t>(k - lo_); }

  Index n_;
  Variant variant_;
  Index lo_;
  Index hi_;
  std::vector<double> log_product_;
  std::vector<double> measure_;
};

/// L_n(k) from the kernel engine, evaluated directly.
double log_weight_product(const WeightSequence& ws, Index n, Index k);

/// Norm weight 1/alpha(k) of index k for mode n and the given variant.
double norm_measure(const WeightSequence& ws, Index n, Variant variant, Index k);

ModeVector apply_A(const WeightSequence& ws, Index n, const ModeVector& g);
ModeVector apply_A_variant(const WeightSequence& ws, Index n, Variant variant, const ModeVector& g);

/// Exact evaluation of the mode-n parametrix at every index of the window.
/// The window must contain the support of g.
WindowedVector apply_Q(const WeightSequence& ws, Index n, const ModeVector& g, const TruncationWindow& window);
WindowedVector apply_Q_variant(const WeightSequence& ws, Index n, Variant variant, const ModeVector& g,
                               const TruncationWindow& window);

/// Formal kernel element R^(n)(k) = w+^n exp(-L_n(k)) (1 for n = 0).
double kernel_R(const WeightSequence& ws, Index n, Index k);
WindowedVector kernel_R_window(const WeightSequence& ws, Index n, const TruncationWindow& window);

/// ||g||_a = sqrt(sum_k |g(k)|^2 / a(k)).
double weighted_norm(const WeightSequence& ws, const ModeVector& g);
double weighted_norm(const WeightSequence& ws, const WindowedVector& v);
double variant_norm(const WeightSequence& ws, Index n, Variant variant, const WindowedVector& v);
double variant_norm(const WeightSequence& ws, Index n, Variant variant, const ModeVector& g);

struct InverseResiduals {
  double right;   ///< ||A(Q g) - g|| over the window
  double left;    ///< ||Q(A g) - g|| over the window
  double g_norm;  ///< ||g|| in the same norm
};

/// Both inverse identities for mode n. The window must contain supp(g) with
/// a margin of at least two indices on each side.
InverseResiduals residual_inverse(const WeightSequence& ws, Index n, const ModeVector& g,
                                  const TruncationWindow& window, Variant variant = Variant::unbalanced);

struct BoundaryLimit {
  cplx value;        ///< last windowed value, the estimate of g_inf
  double increment;  ///< |v(k_max) - v(k_max - 1)|
  bool converged;    ///< increment below the threshold
};

BoundaryLimit boundary_limit(const WindowedVector& v, double threshold = 1e-10);

/// Log partial sums log sum_{k=-j}^{0} |R^(n)(k)|^2 / a(k) for j = 0..K.
std::vector<double> kernel_log_partial_sums(const WeightSequence& ws, Index n, Index K);

/// sqrt(sum_{|k|<=K} |R^(n)(k)|^2 / a(k)), accumulated in log space.
double kernel_weighted_norm(const WeightSequence& ws, Index n, Index K);

}  // namespace qdisk
