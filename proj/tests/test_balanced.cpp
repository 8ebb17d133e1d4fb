#include <doctest.h>

#include <cmath>
#include <random>

#include "oracle.hpp"
#include "qdisk/balanced.hpp"

using namespace qdisk;

namespace {

const oracle::Family kLogistic{WeightFamily::logistic};

ModeVector random_vector(std::mt19937_64& rng, Index radius) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ModeVector g;
  for (Index k = -radius; k <= radius; ++k) {
    if (u(rng) > 0.0) g.set(k, {u(rng), u(rng)});
  }
  if (g.empty()) g.set(0, 1.0);
  return g;
}

}  // namespace

TEST_SUITE("balanced") {
  TEST_CASE("mode zero coincides with the unbalanced operators") {
    const auto ws = WeightSequence::logistic();
    std::mt19937_64 rng(5);
    const TruncationWindow window(-12, 12);
    for (int s = 0; s < 5; ++s) {
      const ModeVector g = random_vector(rng, 8);
      const ModeVector ab = apply_A_balanced(ws, 0, g);
      const ModeVector au = apply_A(ws, 0, g);
      for (const auto& [k, v] : ab.entries()) REQUIRE(std::abs(v - au(k)) <= 1e-14 * std::abs(au(k)));

      const WindowedVector qb = apply_Q_balanced(ws, 0, g, window);
      const WindowedVector qu = apply_Q(ws, 0, g, window);
      for (Index k = -12; k <= 12; ++k) REQUIRE(std::abs(qb.at(k) - qu.at(k)) <= 1e-14 * std::abs(qu.at(k)));

      CHECK(balanced_norm(ws, 0, g) == doctest::Approx(weighted_norm(ws, g)).epsilon(1e-14));
    }
    CHECK(apply_A_balanced(ws, 2, ModeVector{}).empty());
    const BalancedNormWeights weights(ws, 0);
    CHECK(weights(4) == doctest::Approx(1.0 / a_eval(ws, 4)).epsilon(1e-15));
  }

  TEST_CASE("A on a delta") {
    const auto ws = WeightSequence::logistic();
    const ModeVector a = apply_A_balanced(ws, 2, ModeVector::delta(0));
    CHECK(oracle::rel_err(a(0).real(), oracle::a_balanced(kLogistic, 2, 0)) < 1e-14);
    const oracle::mp expected = -oracle::a_balanced(kLogistic, 2, -1) * oracle::c(kLogistic, 2, -1);
    CHECK(oracle::rel_err(a(-1).real(), expected) < 1e-14);
  }

  TEST_CASE("Q on a delta") {
    const auto ws = WeightSequence::logistic();
    const WindowedVector q = apply_Q_balanced(ws, 1, ModeVector::delta(0), TruncationWindow(-3, 3));
    const oracle::mp expected = -(oracle::w(kLogistic, 0) / oracle::w(kLogistic, 1)) *
                                sqrt(oracle::S(kLogistic, 0) * oracle::S(kLogistic, 1)) /
                                (oracle::w(kLogistic, 0) * oracle::w(kLogistic, 1));
    CHECK(oracle::rel_err(q.at(1).real(), expected) < 1e-14);
    CHECK(q.at(0) == cplx{});
  }

  TEST_CASE("balanced norm") {
    const auto ws = WeightSequence::logistic();
    CHECK(balanced_norm(ws, 3, ModeVector::delta(-4)) == doctest::Approx(1.0 / std::sqrt(a_balanced_eval(ws, 3, -4))));
    std::mt19937_64 rng(17);
    const ModeVector g = random_vector(rng, 10);
    oracle::mp sum = 0;
    for (const auto& [k, v] : g.entries()) sum += oracle::mp(std::norm(v)) / oracle::a_balanced(kLogistic, 3, k);
    CHECK(oracle::rel_err(balanced_norm(ws, 3, g), sqrt(sum)) < 1e-14);
  }

  TEST_CASE("balanced inverse identities") {
    std::mt19937_64 rng(23);
    for (const WeightSequence& ws : {WeightSequence::logistic(), WeightSequence::piecewise_exponential()}) {
      for (Index n = -8; n <= 8; ++n) {
        for (int s = 0; s < 8; ++s) {
          const ModeVector g = random_vector(rng, 10);
          const InverseResiduals r = residual_inverse(ws, n, g, TruncationWindow(-13, 13), Variant::balanced);
          REQUIRE(r.right < 1e-12 * r.g_norm);
          REQUIRE(r.left < 1e-12 * r.g_norm);
        }
      }
    }
  }

  TEST_CASE("sigma sums against direct summation") {
    const auto ws = WeightSequence::logistic();
    const TruncationWindow window(-60, 60);
    for (Index k : {-20, 0, 15}) {
      // n = -1: the kernel couples l >= k with weight ratio w(k-1)/w(l-1)
      oracle::mp direct = 0;
      for (Index l = k; l <= 60; ++l) {
        direct += oracle::w(kLogistic, k - 1) / oracle::w(kLogistic, l - 1) *
                  sqrt(oracle::S(kLogistic, l) * oracle::S(kLogistic, l - 1)) /
                  (oracle::w(kLogistic, l) * oracle::w(kLogistic, l - 1));
      }
      CHECK(oracle::rel_err(sigma1_window(ws, -1, k, window), direct) < 1e-13);

      const SigmaSums s = sigma_sums(ws, -1, k, window);
      CHECK(s.sigma1 == doctest::Approx(sigma1_window(ws, -1, k, window) + s.tail1).epsilon(1e-13));
      CHECK(s.tail1 >= 0.0);
      CHECK(s.tail2 >= 0.0);
    }
    CHECK_THROWS_AS(sigma_sums(ws, -1, 61, window), PreconditionError);
  }

  TEST_CASE("Cauchy-Schwarz domination") {
    const auto ws = WeightSequence::logistic();
    const TruncationWindow window(-80, 80);
    for (Index n : {-7, -3, -1, 1, 4}) {
      for (Index k = -70; k <= 70; k += 10) {
        REQUIRE(sigma1_window(ws, n, k, window) <= sigma1_cauchy_schwarz(ws, n, k, window) * (1.0 + 1e-13));
      }
    }
  }

  TEST_CASE("window part of sigma grows with the window and converges") {
    const auto ws = WeightSequence::logistic();
    for (Index n : {-4, -1}) {
      double prev = 0.0;
      double last_step = 0.0;
      for (Index half = 20; half <= 320; half *= 2) {
        const double v = sigma1_window(ws, n, 0, TruncationWindow(-half, half));
        REQUIRE(v >= prev);
        last_step = v - prev;
        prev = v;
      }
      CHECK(last_step < 1e-12 * prev);
    }
  }

  TEST_CASE("sigma sups are finite and bounded across modes") {
    const auto ws = WeightSequence::logistic();
    double worst = 0.0;
    for (Index n = -12; n <= 12; ++n) {
      if (n == 0) continue;
      const SigmaSup s = sigma_sup(ws, n, TruncationWindow(-100, 100));
      REQUIRE(std::isfinite(s.sigma1));
      REQUIRE(std::isfinite(s.sigma2));
      worst = std::max({worst, s.sigma1, s.sigma2});
    }
    CHECK(worst < 10.0);
  }

  TEST_CASE("sigma sups of exponentially decaying weights are stable under window doubling") {
    for (const WeightSequence& ws : {WeightSequence::logistic(), WeightSequence::piecewise_exponential()}) {
      for (Index n : {-5, -1, 1, 5}) {
        const SigmaSup s1 = sigma_sup(ws, n, TruncationWindow(-200, 200));
        const SigmaSup s2 = sigma_sup(ws, n, TruncationWindow(-1600, 1600));
        CHECK(s2.sigma1 == doctest::Approx(s1.sigma1).epsilon(1e-6));
        CHECK(s2.sigma2 == doctest::Approx(s1.sigma2).epsilon(1e-6));
      }
    }
  }
}
