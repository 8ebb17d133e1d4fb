#include "qdisk/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "summation.hpp"

namespace qdisk {

OperatorMatrix assemble_matrix(const WeightSequence& ws, const ModeOperatorSpec& spec, const TruncationWindow& window) {
  spec.check();
  if (window.width() < 4) throw PreconditionError("assemble_matrix needs a window of width >= 4");

  const auto size = static_cast<Eigen::Index>(window.width());
  OperatorMatrix out{window, window, Eigen::MatrixXd::Zero(size, size)};
  const ModeKernel kernel(ws, spec.n, spec.variant, window.k_min(), window.k_max());

  if (spec.kind == OperatorKind::Q) {
    std::vector<double> root_mu(static_cast<std::size_t>(size));
    for (Index k = window.k_min(); k <= window.k_max(); ++k) root_mu[window.offset(k)] = std::sqrt(kernel.measure(k));
    for (Index l = window.k_min(); l <= window.k_max(); ++l) {
      const auto j = window.offset(l);
      for (Index k = window.k_min(); k <= window.k_max(); ++k) {
        if (!kernel.couples(k, l)) continue;
        const auto i = window.offset(k);
        out.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            kernel.sign() * kernel.ratio(k, l) * root_mu[i] * root_mu[j];
      }
    }
    return out;
  }

  // A delta_l = alpha(l) delta_l - alpha(l-1) c(l-1) delta_{l-1}; upper bidiagonal.
  const DerivedCoefficients coeff(ws);
  for (Index l = window.k_min(); l <= window.k_max(); ++l) {
    const auto j = static_cast<Eigen::Index>(window.offset(l));
    out.entries(j, j) = 1.0 / kernel.measure(l);
    if (l > window.k_min()) {
      out.entries(j - 1, j) = -coeff.c(spec.n, l - 1) / std::sqrt(kernel.measure(l - 1) * kernel.measure(l));
    }
  }
  return out;
}

NormEstimate operator_norm(const Eigen::MatrixXd& m, double tol, int max_iterations) {
  if (!(tol > 0.0)) throw PreconditionError("operator_norm needs tol > 0");
  if (m.size() == 0) return {0.0, 0, true};

  Eigen::VectorXd v = Eigen::VectorXd::Ones(m.cols()) / std::sqrt(static_cast<double>(m.cols()));
  double previous = 0.0;
  double sigma = 0.0;
  for (int it = 1; it <= max_iterations; ++it) {
    const Eigen::VectorXd u = m * v;
    sigma = u.norm();
    const Eigen::VectorXd y = m.transpose() * u;
    const double ny = y.norm();
    if (ny == 0.0) return {sigma, it, true};
    v = y / ny;
    if (it > 1 && std::abs(sigma - previous) <= tol * sigma) return {sigma, it, true};
    previous = sigma;
  }
  return {sigma, max_iterations, false};
}

NormEstimate operator_norm_lanczos(const Eigen::MatrixXd& m, double tol, int max_steps) {
  if (!(tol > 0.0)) throw PreconditionError("operator_norm needs tol > 0");
  const Eigen::Index dim = m.cols();
  if (dim == 0) return {0.0, 0, true};
  const int cap = max_steps < 0 ? static_cast<int>(dim) : std::min<int>(max_steps, static_cast<int>(dim));

  std::vector<Eigen::VectorXd> basis;
  std::vector<double> alpha;
  std::vector<double> beta;
  Eigen::VectorXd v = Eigen::VectorXd::Ones(dim) / std::sqrt(static_cast<double>(dim));
  double theta = 0.0;
  double previous = 0.0;
  int quiet_steps = 0;

  for (int step = 1; step <= cap; ++step) {
    Eigen::VectorXd w = m.transpose() * (m * v);
    const double a = v.dot(w);
    basis.push_back(v);
    alpha.push_back(a);
    // two passes of classical Gram-Schmidt against the whole basis
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : basis) w -= q.dot(w) * q;
    }

    Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alpha.data(), static_cast<Eigen::Index>(alpha.size()));
    Eigen::VectorXd sub = beta.empty() ? Eigen::VectorXd()
                                       : Eigen::Map<const Eigen::VectorXd>(beta.data(), static_cast<Eigen::Index>(beta.size()));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    theta = std::max(0.0, solver.eigenvalues().maxCoeff());

    const double b = w.norm();
    if (b <= 1e-14 * std::max(theta, std::numeric_limits<double>::min())) return {std::sqrt(theta), step, true};
    if (step > 1 && std::abs(theta - previous) <= tol * theta) {
      if (++quiet_steps >= 2) return {std::sqrt(theta), step, true};
    } else {
      quiet_steps = 0;
    }
    previous = theta;
    beta.push_back(b);
    v = w / b;
  }
  // the Krylov space is the whole space once cap == dim
  return {std::sqrt(theta), cap, cap == static_cast<int>(dim)};
}

double integral_tail(const WeightSequence& ws, TailExponent exponent, Index edge, TailSide side) {
  const double w = ws.w(edge);
  const double wp = ws.w_plus();
  const double gap = ws.w_sq_deficit(edge) / (wp + w);  // w_plus - w(edge)
  if (exponent == TailExponent::minus_half) {
    return side == TailSide::lower ? 2.0 * w : 2.0 * gap;
  }
  if (side == TailSide::lower) return std::numeric_limits<double>::infinity();
  return 2.0 * gap / (w * wp);
}

SchurYoungSums schur_young_sums(const WeightSequence& ws, Index n, Variant variant, const TruncationWindow& window) {
  if (n == 0) throw PreconditionError("Schur-Young sums are only defined for n != 0");
  const auto size = static_cast<std::size_t>(window.width());
  SchurYoungSums out{window, std::vector<double>(size), std::vector<double>(size), std::vector<double>(size),
                     std::vector<double>(size)};

  const ModeKernel kernel(ws, n, variant, window.k_min(), window.k_max());
  std::vector<detail::NeumaierSum> rows(size);
  std::vector<detail::NeumaierSum> cols(size);
  for (Index k = window.k_min(); k <= window.k_max(); ++k) {
    for (Index l = window.k_min(); l <= window.k_max(); ++l) {
      if (!kernel.couples(k, l)) continue;
      const double r = kernel.ratio(k, l);
      rows[window.offset(k)].add(r * kernel.measure(l));
      cols[window.offset(l)].add(r * kernel.measure(k));
    }
  }

  const Index a = window.k_min();
  const Index b = window.k_max();
  const Index reach = (n < 0 ? -n : n) + 1;
  const double rho = sup_ratio(ws, window.widened(reach, reach));
  // 2 w(edge) = integral of t^-1/2 over (0, w(edge)^2], kept as a logarithm
  // because it is divided by weights that underflow far to the left
  auto log_lower_half = [&](Index edge) { return std::log(2.0) + ws.log_w(edge); };
  auto upper_three = [&](Index edge) {
    return integral_tail(ws, TailExponent::minus_three_halves, edge, TailSide::upper);
  };

  // Outside-window parts: the weight ratio is bounded by its first (n > 0)
  // or last (n < 0) factor, the remaining sums by the integral comparisons.
  // In the balanced norm mu = sqrt(mu(l) mu(l+n)) is split by Cauchy-Schwarz
  // into the unbalanced tail and the same tail shifted by n.
  for (Index k = a; k <= b; ++k) {
    const auto i = window.offset(k);
    double row_tail = 0.0;
    double col_tail = 0.0;
    if (n > 0) {
      double log_row = log_lower_half(a - 1) - ws.log_w(k);
      col_tail = ws.w(k) * upper_three(b);
      if (variant == Variant::balanced) {
        log_row = 0.5 * (log_row + log_lower_half(a - 1 + n) - ws.log_w(k + n - 1));
        col_tail = std::sqrt(col_tail * ws.w(k + n - 1) * rho * upper_three(b + n));
      }
      row_tail = std::exp(log_row);
    } else {
      row_tail = ws.w(k - 1) * rho * upper_three(b);
      double log_col = log_lower_half(a - 1) - ws.log_w(k - 1);
      if (variant == Variant::balanced) {
        row_tail = std::sqrt(row_tail * ws.w(k + n) * upper_three(b + n));
        log_col = 0.5 * (log_col + log_lower_half(a - 1 + n) - ws.log_w(k + n));
      }
      col_tail = std::exp(log_col);
    }
    out.rows[i] = rows[i].value();
    out.cols[i] = cols[i].value();
    out.row_tails[i] = row_tail;
    out.col_tails[i] = col_tail;
  }
  return out;
}

SchurYoungBound schur_young_bound(const WeightSequence& ws, Index n, Variant variant, const TruncationWindow& window) {
  const SchurYoungSums sums = schur_young_sums(ws, n, variant, window);
  SchurYoungBound out{0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < sums.rows.size(); ++i) {
    out.row_sup = detail::nan_max(out.row_sup, sums.rows[i] + sums.row_tails[i]);
    out.col_sup = detail::nan_max(out.col_sup, sums.cols[i] + sums.col_tails[i]);
    out.tail = detail::nan_max(out.tail, detail::nan_max(sums.row_tails[i], sums.col_tails[i]));
  }
  out.bound = std::sqrt(out.row_sup * out.col_sup);
  return out;
}

std::optional<double> closed_form_bound(const WeightSequence& ws, Index n, Variant variant,
                                        const TruncationWindow& window) {
  if (n == 0) throw PreconditionError("no norm bound is claimed for n = 0");
  if (variant == Variant::balanced) return std::nullopt;
  if (n > 0) return 2.0;
  const Index reach = -n + 1;
  return 2.0 * sup_ratio(ws, window.widened(reach, reach));
}

BoundReport make_bound_report(const WeightSequence& ws, Index n, Variant variant, const TruncationWindow& window,
                              NormMethod method, double tol) {
  const OperatorMatrix q = assemble_matrix(ws, {n, variant, OperatorKind::Q}, window);
  const NormEstimate norm = method == NormMethod::lanczos ? operator_norm_lanczos(q.entries, tol)
                                                          : operator_norm(q.entries, tol);
  const SchurYoungBound sy = schur_young_bound(ws, n, variant, window);
  const std::optional<double> cf = closed_form_bound(ws, n, variant, window);

  double limit = sy.bound;
  if (cf) limit = std::min(limit, *cf);
  return {n, variant, window, norm.value, sy.bound, cf, sy.tail, norm.converged,
          norm.value <= limit + kDominanceSlack};
}

std::vector<IntegralComparison> check_integral_comparisons(const WeightSequence& ws, const TruncationWindow& window,
                                                           double slack) {
  const Index A = window.k_min();
  const Index B = window.k_max();
  const auto size = static_cast<std::size_t>(window.width());

  std::vector<IntegralComparison> out;
  for (TailExponent e : {TailExponent::minus_half, TailExponent::minus_three_halves}) {
    const double power = e == TailExponent::minus_half ? 1.0 : 3.0;
    std::vector<double> at_k(size);       // f(w(k)^2) S(k)
    std::vector<double> at_prev(size);    // f(w(k-1)^2) S(k)
    for (Index k = A; k <= B; ++k) {
      // w^-3 alone overflows far to the left
      const double log_S = ws.log_S(k);
      at_k[window.offset(k)] = std::exp(log_S - power * ws.log_w(k));
      at_prev[window.offset(k)] = std::exp(log_S - power * ws.log_w(k - 1));
    }

    // sums over (l, B] against the integral from w(l)^2 to w_plus^2
    IntegralComparison above{"sum_above", e, std::numeric_limits<double>::infinity(), A, true};
    {
      detail::NeumaierSum suffix;
      for (Index l = B; l >= A; --l) {
        const double lhs = suffix.value();
        const double rhs = integral_tail(ws, e, l, TailSide::upper);
        const double margin = (rhs - lhs) / std::max(1.0, rhs);
        if (margin < above.worst_margin) {
          above.worst_margin = margin;
          above.worst_edge = l;
        }
        above.pass = above.pass && lhs <= rhs + slack * std::max(1.0, rhs);
        suffix.add(at_k[window.offset(l)]);
      }
    }

    // sums over [A, l] against the integral from 0 to w(l)^2
    IntegralComparison below{"sum_below", e, std::numeric_limits<double>::infinity(), A, true};
    {
      detail::NeumaierSum prefix;
      for (Index l = A; l <= B; ++l) {
        prefix.add(at_k[window.offset(l)]);
        const double lhs = prefix.value();
        const double rhs = integral_tail(ws, e, l, TailSide::lower);
        const double margin = (rhs - lhs) / std::max(1.0, rhs);
        if (margin < below.worst_margin) {
          below.worst_margin = margin;
          below.worst_edge = l;
        }
        below.pass = below.pass && lhs <= rhs + slack * std::max(1.0, rhs);
      }
    }

    // sums of f(w(k-1)^2) S(k) over [A, l] bound the integral over [w(A-1)^2, w(l)^2] from above
    IntegralComparison shifted{"sum_shifted", e, std::numeric_limits<double>::infinity(), A, true};
    {
      detail::NeumaierSum prefix;
      const double w_start = ws.w(A - 1);
      for (Index l = A; l <= B; ++l) {
        prefix.add(at_prev[window.offset(l)]);
        const double lhs = prefix.value();
        const double w_end = ws.w(l);
        const double rhs = e == TailExponent::minus_half ? 2.0 * (w_end - w_start)
                                                         : 2.0 * (1.0 / w_start - 1.0 / w_end);
        const double margin = (lhs - rhs) / std::max(1.0, rhs);
        if (margin < shifted.worst_margin) {
          shifted.worst_margin = margin;
          shifted.worst_edge = l;
        }
        shifted.pass = shifted.pass && lhs + slack * std::max(1.0, rhs) >= rhs;
      }
    }

    out.push_back(above);
    out.push_back(below);
    out.push_back(shifted);
  }
  return out;
}

}  // namespace qdisk
