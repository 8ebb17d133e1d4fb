#include <doctest.h>

#include <cmath>

#include "qdisk/classical.hpp"

using namespace qdisk;

namespace {

ClassicalModeFunction constant(const LogGrid& grid, cplx value) {
  return {std::vector<cplx>(static_cast<std::size_t>(grid.m), value)};
}

}  // namespace

TEST_SUITE("classical") {
  TEST_CASE("grid") {
    const LogGrid grid = make_log_grid(20.0, 2000);
    CHECK(grid.nodes.front() == 0.0);
    CHECK(grid.nodes.back() == 20.0);
    double total = 0.0;
    for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
      if (i > 0) REQUIRE(grid.nodes[i] > grid.nodes[i - 1]);
      REQUIRE(grid.quad_weights[i] > 0.0);
      total += grid.quad_weights[i];
    }
    CHECK(total == doctest::Approx(20.0).epsilon(1e-13));
    CHECK_THROWS_AS(make_log_grid(0.0, 100), ConfigError);
    CHECK_THROWS_AS(make_log_grid(5.0, 1), ConfigError);
  }

  TEST_CASE("coarse grids are rejected") {
    const LogGrid grid = make_log_grid(5.0, 10);
    CHECK_THROWS_AS(classical_Q_matrix(1, grid), PreconditionError);
    CHECK_THROWS_AS(classical_residual(1, constant(grid, 1.0), grid), PreconditionError);
    CHECK_THROWS_AS(classical_norm_estimate(0, make_log_grid(5.0, 100)), PreconditionError);
  }

  TEST_CASE("Q of zero") {
    const LogGrid grid = make_log_grid(20.0, 400);
    for (const cplx& v : classical_apply_Q(1, constant(grid, 0.0), grid).values) CHECK(v == cplx{});
    CHECK(classical_residual(1, constant(grid, 0.0), grid) == 0.0);
    CHECK(classical_residual(-3, constant(grid, 0.0), grid) == 0.0);
  }

  TEST_CASE("n = -1 on a constant matches the closed form") {
    for (Index m : {500, 1000, 2000}) {
      const LogGrid grid = make_log_grid(20.0, m);
      const ClassicalModeFunction f = classical_apply_Q(-1, constant(grid, 1.0), grid);
      double worst = 0.0;
      for (std::size_t i = 0; i < f.values.size(); ++i) {
        worst = std::max(worst, std::abs(f.values[i].real() - (1.0 - std::exp(-grid.nodes[i]))));
      }
      const double h = grid.spacing();
      CHECK(worst < 0.1 * h * h);
    }
  }

  TEST_CASE("recursion and matrix agree") {
    const LogGrid grid = make_log_grid(8.0, 300);
    ClassicalModeFunction g{std::vector<cplx>(300)};
    for (std::size_t i = 0; i < 300; ++i) g.values[i] = {std::cos(grid.nodes[i]), std::sin(3.0 * grid.nodes[i])};
    for (Index n : {-4, -1, 0, 2, 7}) {
      const Eigen::MatrixXd action = classical_Q_action(n, grid);
      const ClassicalModeFunction f = classical_apply_Q(n, g, grid);
      for (Eigen::Index i = 0; i < 300; ++i) {
        cplx acc{};
        for (Eigen::Index j = 0; j < 300; ++j) acc += action(i, j) * g.values[static_cast<std::size_t>(j)];
        REQUIRE(std::abs(acc - f.values[static_cast<std::size_t>(i)]) < 1e-12);
      }
    }
  }

  TEST_CASE("Volterra structure") {
    const LogGrid grid = make_log_grid(10.0, 200);
    const OperatorMatrix pos = classical_Q_matrix(3, grid);
    const OperatorMatrix neg = classical_Q_matrix(-3, grid);
    for (Eigen::Index i = 0; i < 200; ++i) {
      for (Eigen::Index j = 0; j < i; ++j) REQUIRE(pos.entries(i, j) == 0.0);
      for (Eigen::Index j = i + 1; j < 200; ++j) REQUIRE(neg.entries(i, j) == 0.0);
    }
  }

  TEST_CASE("norm band at the default grid") {
    const LogGrid grid = make_log_grid(20.0, 2000);
    for (Index n : {-1, 1}) {
      const ClassicalNorm est = classical_norm_estimate(n, grid);
      CHECK(est.converged);
      CHECK(est.value >= 0.9);
      CHECK(est.value <= 1.0 + 1e-3);
    }
    for (Index n : {-5, 5}) CHECK(classical_norm_estimate(n, grid).value <= 0.2 + 1e-3);
  }

  TEST_CASE("grid refinement changes the norm by little") {
    const double coarse = classical_norm_estimate(1, make_log_grid(20.0, 1000)).value;
    const double fine = classical_norm_estimate(1, make_log_grid(20.0, 1999)).value;
    CHECK(std::abs(coarse - fine) < 1e-4);
  }

  TEST_CASE("norm grows with the cutoff at fixed spacing") {
    for (Index n : {-2, 1}) {
      double prev = 0.0;
      for (double T : {2.0, 4.0, 8.0, 16.0}) {
        const auto m = static_cast<Index>(T * 50.0) + 1;
        const double v = classical_norm_estimate(n, make_log_grid(T, m)).value;
        REQUIRE(v >= prev);
        prev = v;
      }
    }
  }

  TEST_CASE("residual converges at second order") {
    for (Index n : {-3, -1, 1, 4}) {
      double prev = 0.0;
      for (Index m : {501, 1001, 2001, 4001}) {
        const LogGrid grid = make_log_grid(20.0, m);
        const double r = classical_residual(n, constant(grid, 1.0), grid);
        if (prev > 0.0) CHECK(std::log2(prev / r) == doctest::Approx(2.0).epsilon(0.05));
        prev = r;
      }
    }
  }

  TEST_CASE("Schur-Young sums within quadrature error of 1/|n|") {
    const LogGrid grid = make_log_grid(20.0, 1000);
    const double h = grid.spacing();
    for (Index n : {-6, -2, -1, 1, 3}) {
      const ClassicalSchurYoung sy = classical_schur_young(n, grid);
      const double bound = 1.0 / std::abs(static_cast<double>(n)) + std::abs(static_cast<double>(n)) * h * h;
      CHECK(sy.row_sup <= bound);
      CHECK(sy.col_sup <= bound);
      CHECK(classical_norm_estimate(n, grid).value <= std::sqrt(sy.row_sup * sy.col_sup) + 1e-12);
    }
  }
}
