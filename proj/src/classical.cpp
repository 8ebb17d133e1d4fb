#include "qdisk/classical.hpp"

#include <cmath>
#include <string>

namespace qdisk {

namespace {

void require_fine(const LogGrid& grid) {
  if (grid.m < kMinClassicalPoints) {
    throw PreconditionError("grid too coarse: m = " + std::to_string(grid.m) + " < " +
                            std::to_string(kMinClassicalPoints));
  }
}

double kernel(Index n, double t, double s) {
  const double nd = static_cast<double>(n);
  if (n > 0) return s >= t ? -std::exp(-nd * (s - t)) : 0.0;
  return s <= t ? std::exp(nd * (t - s)) : 0.0;
}

}  // namespace

LogGrid make_log_grid(double T, Index m) {
  if (!(T > 0.0) || !std::isfinite(T)) throw ConfigError("grid cutoff T must be positive");
  if (m < 2) throw ConfigError("grid needs at least two points");
  LogGrid grid{T, m, std::vector<double>(static_cast<std::size_t>(m)), std::vector<double>(static_cast<std::size_t>(m))};
  const double h = grid.spacing();
  for (Index i = 0; i < m; ++i) {
    grid.nodes[static_cast<std::size_t>(i)] = i == m - 1 ? T : h * static_cast<double>(i);
    grid.quad_weights[static_cast<std::size_t>(i)] = (i == 0 || i == m - 1) ? 0.5 * h : h;
  }
  return grid;
}

Eigen::MatrixXd classical_Q_action(Index n, const LogGrid& grid) {
  require_fine(grid);
  const auto m = static_cast<Eigen::Index>(grid.m);
  const double h = grid.spacing();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double t = grid.nodes[static_cast<std::size_t>(i)];
    if (n > 0) {
      if (i == m - 1) continue;
      for (Eigen::Index j = i; j < m; ++j) {
        const double weight = (j == i || j == m - 1) ? 0.5 * h : h;
        out(i, j) = weight * kernel(n, t, grid.nodes[static_cast<std::size_t>(j)]);
      }
    } else {
      if (i == 0) continue;
      for (Eigen::Index j = 0; j <= i; ++j) {
        const double weight = (j == 0 || j == i) ? 0.5 * h : h;
        out(i, j) = weight * kernel(n, t, grid.nodes[static_cast<std::size_t>(j)]);
      }
    }
  }
  return out;
}

OperatorMatrix classical_Q_matrix(Index n, const LogGrid& grid) {
  Eigen::MatrixXd action = classical_Q_action(n, grid);
  const Eigen::Map<const Eigen::VectorXd> w(grid.quad_weights.data(), static_cast<Eigen::Index>(grid.m));
  const Eigen::VectorXd root = w.array().sqrt();
  action = root.asDiagonal() * action * root.cwiseInverse().asDiagonal();
  const TruncationWindow nodes(0, grid.m - 1);
  return {nodes, nodes, std::move(action)};
}

ClassicalModeFunction classical_apply_Q(Index n, const ClassicalModeFunction& g, const LogGrid& grid) {
  if (static_cast<Index>(g.values.size()) != grid.m) throw PreconditionError("mode function does not match the grid");
  const auto m = g.values.size();
  const double h = grid.spacing();
  const double nd = static_cast<double>(n);
  ClassicalModeFunction f{std::vector<cplx>(m)};
  if (n <= 0) {
    const double decay = std::exp(nd * h);
    for (std::size_t i = 1; i < m; ++i) {
      f.values[i] = decay * f.values[i - 1] + 0.5 * h * (decay * g.values[i - 1] + g.values[i]);
    }
  } else {
    const double decay = std::exp(-nd * h);
    for (std::size_t i = m - 1; i-- > 0;) {
      f.values[i] = decay * f.values[i + 1] - 0.5 * h * (g.values[i] + decay * g.values[i + 1]);
    }
  }
  return f;
}

ClassicalNorm classical_norm_estimate(Index n, const LogGrid& grid, double tol) {
  if (n == 0) throw PreconditionError("no norm bound is claimed for the n = 0 classical mode");
  const OperatorMatrix q = classical_Q_matrix(n, grid);
  const NormEstimate est = operator_norm_lanczos(q.entries, tol);
  const double h = grid.spacing();
  const double abs_n = std::abs(static_cast<double>(n));
  return {est.value, abs_n * h * h / 12.0, est.iterations, est.converged};
}

double classical_residual(Index n, const ClassicalModeFunction& g, const LogGrid& grid) {
  require_fine(grid);
  const ClassicalModeFunction f = classical_apply_Q(n, g, grid);
  const double h = grid.spacing();
  const double nd = static_cast<double>(n);
  double acc = 0.0;
  for (std::size_t i = 2; i + 2 < f.values.size(); ++i) {
    const cplx derivative = (f.values[i + 1] - f.values[i - 1]) / (2.0 * h);
    acc += h * std::norm(derivative - nd * f.values[i] - g.values[i]);
  }
  return std::sqrt(acc);
}

ClassicalSchurYoung classical_schur_young(Index n, const LogGrid& grid) {
  if (n == 0) throw PreconditionError("classical Schur-Young sums need n != 0");
  require_fine(grid);
  const Eigen::MatrixXd action = classical_Q_action(n, grid);
  const auto m = static_cast<Eigen::Index>(grid.m);
  const double h = grid.spacing();

  ClassicalSchurYoung out{0.0, 0.0};
  for (Eigen::Index i = 0; i < m; ++i) out.row_sup = std::max(out.row_sup, action.row(i).cwiseAbs().sum());

  // column integrals over t, trapezoid on the support of K(., s)
  for (Eigen::Index j = 0; j < m; ++j) {
    const double s = grid.nodes[static_cast<std::size_t>(j)];
    double acc = 0.0;
    const Eigen::Index first = n > 0 ? 0 : j;
    const Eigen::Index last = n > 0 ? j : m - 1;
    if (first == last) continue;
    for (Eigen::Index i = first; i <= last; ++i) {
      const double weight = (i == first || i == last) ? 0.5 * h : h;
      acc += weight * std::abs(kernel(n, grid.nodes[static_cast<std::size_t>(i)], s));
    }
    out.col_sup = std::max(out.col_sup, acc);
  }
  return out;
}

}  // namespace qdisk
