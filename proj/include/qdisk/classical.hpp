#pragma once

#include <vector>

#include <Eigen/Dense>

#include "qdisk/numerics.hpp"
#include "qdisk/types.hpp"

namespace qdisk {

/// Uniform grid in t = -ln r on [0, T]. The measure dr/r becomes dt, so the
/// quadrature weights are plain trapezoid weights.
struct LogGrid {
  double T;
  Index m;
  std::vector<double> nodes;
  std::vector<double> quad_weights;

  double spacing() const { return T / static_cast<double>(m - 1); }
};

LogGrid make_log_grid(double T, Index m);

/// Samples of one Fourier mode f_n(r(t)) at the grid nodes.
struct ClassicalModeFunction {
  std::vector<cplx> values;
};

inline constexpr Index kMinClassicalPoints = 16;

/// Trapezoid discretization of the mode-n parametrix acting on samples:
///   n >  0:  f(t) = -int_t^T exp(-n (s - t)) g(s) ds
///   n <= 0:  f(t) =  int_0^t exp( n (t - s)) g(s) ds     (f(0) = 0)
/// Row i integrates over its own interval, so the node s = t enters with
/// half weight.
Eigen::MatrixXd classical_Q_action(Index n, const LogGrid& grid);

/// classical_Q_action in the basis orthonormal for the trapezoid inner
/// product; its largest singular value estimates the L^2 operator norm.
OperatorMatrix classical_Q_matrix(Index n, const LogGrid& grid);

/// Applies the same quadrature by the one-step recursions
///   n <= 0: f_i = e^{nh} f_{i-1} + (h/2)(e^{nh} g_{i-1} + g_i)
///   n >  0: f_i = e^{-nh} f_{i+1} - (h/2)(g_i + e^{-nh} g_{i+1})
ClassicalModeFunction classical_apply_Q(Index n, const ClassicalModeFunction& g, const LogGrid& grid);

struct ClassicalNorm {
  double value;
  double quadrature_slack;  ///< leading trapezoid overshoot |n| h^2 / 12
  int iterations;
  bool converged;
};

ClassicalNorm classical_norm_estimate(Index n, const LogGrid& grid, double tol = 1e-12);

/// || f' - n f - g || over interior nodes (two dropped at each end), where
/// f = Q g and f' is the central difference. Second order in the spacing.
double classical_residual(Index n, const ClassicalModeFunction& g, const LogGrid& grid);

struct ClassicalSchurYoung {
  double row_sup;  ///< sup_t int |K(t, s)| ds
  double col_sup;  ///< sup_s int |K(t, s)| dt
};

ClassicalSchurYoung classical_schur_young(Index n, const LogGrid& grid);

}  // namespace qdisk
