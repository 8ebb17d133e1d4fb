#include "qdisk/modes.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "summation.hpp"

namespace qdisk {

ModeVector& ModeVector::operator+=(const ModeVector& other) {
  for (const auto& [k, v] : other.entries_) entries_[k] += v;
  return *this;
}

ModeVector& ModeVector::operator*=(cplx s) {
  for (auto& [k, v] : entries_) v *= s;
  return *this;
}

double log_weight_product(const WeightSequence& ws, Index n, Index k) {
  double acc = 0.0;
  if (n > 0) {
    for (Index j = 0; j < n; ++j) acc += ws.log_w(k + j);
  } else if (n < 0) {
    for (Index j = n; j < 0; ++j) acc -= ws.log_w(k + j);
  }
  return acc;
}

double norm_measure(const WeightSequence& ws, Index n, Variant variant, Index k) {
  const DerivedCoefficients coeff(ws);
  return variant == Variant::balanced ? coeff.measure_balanced(n, k) : coeff.measure(k);
}

ModeKernel::ModeKernel(const WeightSequence& ws, Index n, Variant variant, Index lo, Index hi)
    : n_(n), variant_(variant), lo_(lo), hi_(hi) {
  if (hi < lo) throw PreconditionError("ModeKernel needs lo <= hi");
  const auto count = static_cast<std::size_t>(hi - lo + 1);

  // log w over every index any L(k) touches
  const Index first = lo + std::min<Index>(n, 0);
  const Index last = hi + std::max<Index>(n - 1, -1);
  std::vector<double> log_w(static_cast<std::size_t>(last - first + 1));
  for (Index j = first; j <= last; ++j) log_w[static_cast<std::size_t>(j - first)] = ws.log_w(j);
  auto lw = [&](Index j) { return log_w[static_cast<std::size_t>(j - first)]; };

  log_product_.resize(count);
  measure_.resize(count);
  const DerivedCoefficients coeff(ws);
  for (Index k = lo; k <= hi; ++k) {
    double acc = 0.0;
    if (n > 0) {
      for (Index j = 0; j < n; ++j) acc += lw(k + j);
    } else if (n < 0) {
      for (Index j = n; j < 0; ++j) acc -= lw(k + j);
    }
    log_product_[idx(k)] = acc;
    measure_[idx(k)] = variant == Variant::balanced ? coeff.measure_balanced(n, k) : coeff.measure(k);
  }
}

ModeVector apply_A_variant(const WeightSequence& ws, Index n, Variant variant, const ModeVector& g) {
  ModeVector out;
  if (g.empty()) return out;
  const DerivedCoefficients coeff(ws);
  std::vector<Index> targets;
  for (const auto& [k, v] : g.entries()) {
    targets.push_back(k - 1);
    targets.push_back(k);
  }
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

  for (Index k : targets) {
    const double alpha = variant == Variant::balanced ? coeff.a_balanced(n, k) : coeff.a(k);
    out.set(k, alpha * (g(k) - coeff.c(n, k) * g(k + 1)));
  }
  return out;
}

ModeVector apply_A(const WeightSequence& ws, Index n, const ModeVector& g) {
  return apply_A_variant(ws, n, Variant::unbalanced, g);
}

WindowedVector apply_Q_variant(const WeightSequence& ws, Index n, Variant variant, const ModeVector& g,
                               const TruncationWindow& window) {
  WindowedVector out(window);
  if (g.empty()) return out;
  if (!window.contains(g.support_min()) || !window.contains(g.support_max())) {
    throw PreconditionError("apply_Q: window [" + std::to_string(window.k_min()) + ", " +
                            std::to_string(window.k_max()) + "] does not cover the support [" +
                            std::to_string(g.support_min()) + ", " + std::to_string(g.support_max()) + "]");
  }

  const ModeKernel kernel(ws, n, variant, window.k_min(), window.k_max());
  for (Index k = window.k_min(); k <= window.k_max(); ++k) {
    cplx acc{};
    for (const auto& [l, v] : g.entries()) {
      if (!kernel.couples(k, l)) continue;
      acc += kernel.ratio(k, l) * kernel.measure(l) * v;
    }
    out.at(k) = kernel.sign() * acc;
  }
  return out;
}

WindowedVector apply_Q(const WeightSequence& ws, Index n, const ModeVector& g, const TruncationWindow& window) {
  return apply_Q_variant(ws, n, Variant::unbalanced, g, window);
}

double kernel_R(const WeightSequence& ws, Index n, Index k) {
  if (n == 0) return 1.0;
  return std::exp(static_cast<double>(n) * std::log(ws.w_plus()) - log_weight_product(ws, n, k));
}

WindowedVector kernel_R_window(const WeightSequence& ws, Index n, const TruncationWindow& window) {
  WindowedVector out(window);
  for (Index k = window.k_min(); k <= window.k_max(); ++k) out.at(k) = kernel_R(ws, n, k);
  return out;
}

double weighted_norm(const WeightSequence& ws, const ModeVector& g) {
  return variant_norm(ws, 0, Variant::unbalanced, g);
}

double weighted_norm(const WeightSequence& ws, const WindowedVector& v) {
  return variant_norm(ws, 0, Variant::unbalanced, v);
}

double variant_norm(const WeightSequence& ws, Index n, Variant variant, const ModeVector& g) {
  detail::NeumaierSum sum;
  for (const auto& [k, v] : g.entries()) {
    if (v == cplx{}) continue;
    sum.add(norm_measure(ws, n, variant, k) * std::norm(v));
  }
  return std::sqrt(sum.value());
}

double variant_norm(const WeightSequence& ws, Index n, Variant variant, const WindowedVector& v) {
  detail::NeumaierSum sum;
  for (Index k = v.window.k_min(); k <= v.window.k_max(); ++k) {
    const cplx x = v.at(k);
    if (x == cplx{}) continue;
    sum.add(norm_measure(ws, n, variant, k) * std::norm(x));
  }
  return std::sqrt(sum.value());
}

InverseResiduals residual_inverse(const WeightSequence& ws, Index n, const ModeVector& g,
                                  const TruncationWindow& window, Variant variant) {
  if (g.empty()) return {0.0, 0.0, 0.0};
  if (window.k_min() > g.support_min() - 2 || window.k_max() < g.support_max() + 2) {
    throw PreconditionError("residual_inverse: window must cover the support with a margin of two indices");
  }
  const DerivedCoefficients coeff(ws);

  // A applied pointwise to Q g; Q g is evaluated one index past the window.
  const WindowedVector f = apply_Q_variant(ws, n, variant, g, window.widened(0, 1));
  WindowedVector right(window);
  for (Index k = window.k_min(); k <= window.k_max(); ++k) {
    const double alpha = variant == Variant::balanced ? coeff.a_balanced(n, k) : coeff.a(k);
    right.at(k) = alpha * (f.at(k) - coeff.c(n, k) * f.at(k + 1)) - g(k);
  }

  const ModeVector h = apply_A_variant(ws, n, variant, g);
  WindowedVector left = apply_Q_variant(ws, n, variant, h, window);
  for (Index k = window.k_min(); k <= window.k_max(); ++k) left.at(k) -= g(k);

  return {variant_norm(ws, n, variant, right), variant_norm(ws, n, variant, left), variant_norm(ws, n, variant, g)};
}

BoundaryLimit boundary_limit(const WindowedVector& v, double threshold) {
  const Index last = v.window.k_max();
  const cplx value = v.at(last);
  const double increment = std::abs(value - v.at(last - 1));
  return {value, increment, increment < threshold};
}

std::vector<double> kernel_log_partial_sums(const WeightSequence& ws, Index n, Index K) {
  if (K < 0) throw PreconditionError("kernel_log_partial_sums needs K >= 0");
  const DerivedCoefficients coeff(ws);
  const double log_wp = std::log(ws.w_plus());
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(K + 1));
  detail::LogSumExp lse;
  for (Index j = 0; j <= K; ++j) {
    const Index k = -j;
    const double log_r = static_cast<double>(n) * log_wp - log_weight_product(ws, n, k);
    lse.add(coeff.log_measure(k) + 2.0 * log_r);
    out.push_back(lse.value());
  }
  return out;
}

double kernel_weighted_norm(const WeightSequence& ws, Index n, Index K) {
  const DerivedCoefficients coeff(ws);
  const double log_wp = std::log(ws.w_plus());
  detail::LogSumExp lse;
  for (Index k = -K; k <= K; ++k) {
    const double log_r = static_cast<double>(n) * log_wp - log_weight_product(ws, n, k);
    lse.add(coeff.log_measure(k) + 2.0 * log_r);
  }
  return std::exp(0.5 * lse.value());
}

}  // namespace qdisk
