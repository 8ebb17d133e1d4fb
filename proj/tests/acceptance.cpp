// Acceptance run: one PASS/FAIL line per criterion, exit status 0 only when
// every criterion passes within its time budget.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "qdisk/balanced.hpp"
#include "qdisk/classical.hpp"
#include "qdisk/modes.hpp"
#include "qdisk/numerics.hpp"
#include "qdisk/weights.hpp"

using namespace qdisk;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail << "first failure: " << what << "; ";
      pass = false;
    }
  }
};

const std::vector<WeightFamily> kFamilies{WeightFamily::logistic, WeightFamily::arctan,
                                          WeightFamily::piecewise_exponential};

WeightSequence make(WeightFamily f) {
  switch (f) {
    case WeightFamily::arctan: return WeightSequence::arctan();
    case WeightFamily::piecewise_exponential: return WeightSequence::piecewise_exponential();
    default: return WeightSequence::logistic();
  }
}

std::string label(Index n, Variant v) {
  return std::string(to_string(v)) + " n=" + std::to_string(n);
}

ModeVector random_input(std::mt19937_64& rng, Index radius) {
  std::uniform_int_distribution<Index> centre(-radius, radius);
  std::uniform_int_distribution<int> length(1, 6);
  std::normal_distribution<double> gauss;
  ModeVector g;
  const Index lo = centre(rng);
  const int len = length(rng);
  for (Index k = lo; k < lo + len; ++k) g.set(k, cplx(gauss(rng), gauss(rng)));
  return g;
}

// A applied to Q g with coefficients from the high-precision oracle,
// compared with g in the variant norm.
double oracle_right_residual(const oracle::Family& fam, const WeightSequence& ws, Index n, Variant v,
                             const ModeVector& g, const TruncationWindow& window) {
  const WindowedVector f = apply_Q_variant(ws, n, v, g, window);
  const oracle::ModeCoefficients co(fam, n, v, window.k_min(), window.k_max());
  long double err = 0.0L;
  long double ref = 0.0L;
  for (Index k = window.k_min(); k < window.k_max(); ++k) {
    const long double al = co.alpha_at(k);
    const std::complex<long double> fk(f.at(k).real(), f.at(k).imag());
    const std::complex<long double> fk1(f.at(k + 1).real(), f.at(k + 1).imag());
    const std::complex<long double> gk(g(k).real(), g(k).imag());
    const std::complex<long double> d = al * (fk - co.c_at(k) * fk1) - gk;
    err += std::norm(d) / al;
    ref += std::norm(gk) / al;
  }
  return static_cast<double>(std::sqrt(err / ref));
}

Verdict inverse_identities() {
  Verdict v;
  const WeightSequence ws = WeightSequence::logistic();
  const oracle::Family fam{WeightFamily::logistic};
  std::mt19937_64 rng(20261018);
  double worst = 0.0;
  double worst_oracle = 0.0;
  for (Variant var : {Variant::unbalanced, Variant::balanced}) {
    for (Index n = -12; n <= 12; ++n) {
      for (int s = 0; s < 50; ++s) {
        const ModeVector g = random_input(rng, 10);
        const TruncationWindow window(g.support_min() - 3, g.support_max() + 3);
        const InverseResiduals r = residual_inverse(ws, n, g, window, var);
        const double rel = std::max(r.right, r.left) / r.g_norm;
        worst = std::max(worst, rel);
        v.require(rel < 1e-12, label(n, var) + " residual " + std::to_string(rel));
        if (s < 5) {
          const double o = oracle_right_residual(fam, ws, n, var, g, window);
          worst_oracle = std::max(worst_oracle, o);
          v.require(o < 1e-12, label(n, var) + " oracle residual " + std::to_string(o));
        }
      }
    }
  }
  v.detail << "worst relative residual " << worst << ", oracle-A residual " << worst_oracle;
  return v;
}

Verdict norm_bounds(Variant var) {
  Verdict v;
  const TruncationWindow window(-200, 200);
  const TruncationWindow doubled(-400, 400);
  double worst_gap = -1.0;
  double sigma_max = 0.0;
  std::ostringstream drifts;
  for (WeightFamily f : kFamilies) {
    const WeightSequence ws = make(f);
    double sigma_drift = 0.0;
    for (Index n = -12; n <= 12; ++n) {
      if (n == 0) continue;
      const std::string what = std::string(to_string(f)) + " " + label(n, var);
      const BoundReport r = make_bound_report(ws, n, var, window);
      v.require(r.converged, what + " norm estimate did not converge");
      v.require(r.norm_estimate <= r.schur_young_bound + kDominanceSlack, what + " exceeds Schur-Young");
      worst_gap = std::max(worst_gap, r.norm_estimate - r.schur_young_bound);
      if (var == Variant::unbalanced) {
        const double proven = n > 0 ? 2.0 : 2.0 * sup_ratio(ws, window);
        v.require(r.norm_estimate <= proven + kDominanceSlack, what + " exceeds the uniform bound");
      } else {
        const SigmaSup s1 = sigma_sup(ws, n, window);
        const SigmaSup s2 = sigma_sup(ws, n, doubled);
        const bool finite = std::isfinite(s1.sigma1) && std::isfinite(s1.sigma2);
        v.require(finite, what + " sigma not finite");
        const double drift = std::max(std::abs(s2.sigma1 - s1.sigma1) / s2.sigma1,
                                      std::abs(s2.sigma2 - s1.sigma2) / s2.sigma2);
        sigma_drift = std::max(sigma_drift, drift);
        sigma_max = std::max({sigma_max, s1.sigma1, s1.sigma2});
        v.require(drift < 1e-6, what + " sigma drift " + std::to_string(drift));
      }
    }
    if (var == Variant::balanced) drifts << " " << to_string(f) << " " << sigma_drift;
  }
  v.detail << "max(norm - schur_young) " << worst_gap;
  if (var == Variant::balanced) v.detail << ", max sigma " << sigma_max << ", doubling drift by family:" << drifts.str();
  return v;
}

Verdict classical_bound() {
  Verdict v;
  const LogGrid grid = make_log_grid(20.0, 2000);
  double lo = 1e300;
  double hi = 0.0;
  for (Index m = 1; m <= 10; ++m) {
    for (Index n : {m, -m}) {
      const ClassicalNorm c = classical_norm_estimate(n, grid);
      const double an = static_cast<double>(m);
      v.require(c.converged, "n=" + std::to_string(n) + " not converged");
      v.require(c.value >= 0.9 / an && c.value <= 1.0 / an + 1e-3,
                "n=" + std::to_string(n) + " norm " + std::to_string(c.value) + " outside band");
      lo = std::min(lo, an * c.value);
      hi = std::max(hi, an * c.value);
    }
  }
  // refinement of the residual with g = 1
  double worst_order = 2.0;
  for (Index n : {-10, -3, -1, 1, 3, 10}) {
    std::vector<double> res;
    for (Index m : {2000, 3999, 7997}) {
      const LogGrid g = make_log_grid(20.0, m);
      res.push_back(classical_residual(n, ClassicalModeFunction{std::vector<cplx>(static_cast<std::size_t>(m), 1.0)}, g));
    }
    const double order = std::log2(res[1] / res[2]);
    if (std::abs(order - 2.0) > std::abs(worst_order - 2.0)) worst_order = order;
    v.require(order > 1.8 && order < 2.2, "n=" + std::to_string(n) + " residual order " + std::to_string(order));
  }
  v.detail << "|n| * norm in [" << lo << ", " << hi << "], residual order closest to failing " << worst_order;
  return v;
}

Verdict trace_identity() {
  Verdict v;
  const WeightSequence ws = WeightSequence::logistic();
  const PartialTrace t = trace_S_partial(ws, 100);
  const double gap = std::abs(t.value - 1.0);
  const double ulps = 4.0 * std::numeric_limits<double>::epsilon();
  v.require(gap <= t.tail_bound + ulps, "partial trace outside its tail bound");
  v.require(t.tail_bound < 1e-10, "tail bound too large");
  const oracle::Family fam{WeightFamily::logistic};
  const oracle::mp exact = oracle::w_sq(fam, 100) - oracle::w_sq(fam, -101);
  const double err = oracle::rel_err(t.value, exact);
  v.require(err < 1e-15, "partial trace differs from the telescoped oracle");
  v.detail << "|sum - 1| " << gap << ", tail bound " << t.tail_bound << ", oracle rel. error " << err;
  return v;
}

Verdict kernel_claims() {
  Verdict v;
  const WeightSequence ws = WeightSequence::logistic();
  const oracle::Family fam{WeightFamily::logistic};
  constexpr Index K = 10000;
  double smallest = 1e300;
  for (Index n = 0; n <= 3; ++n) {
    const std::vector<double> logs = kernel_log_partial_sums(ws, n, K);
    bool increasing = true;
    for (std::size_t j = 1; j < logs.size(); ++j) increasing = increasing && logs[j] > logs[j - 1];
    v.require(increasing, "n=" + std::to_string(n) + " partial sums not increasing");
    v.require(logs.back() > std::log(1e3), "n=" + std::to_string(n) + " partial sum below 1e3");
    smallest = std::min(smallest, logs.back());
  }
  double worst_gap = 0.0;
  for (Index n = -1; n >= -3; --n) {
    const BoundaryLimit lim = boundary_limit(kernel_R_window(ws, n, TruncationWindow(0, K)));
    const double gap = std::abs(lim.value - cplx(1.0));
    worst_gap = std::max(worst_gap, gap);
    v.require(lim.converged && gap <= 1e-8, "n=" + std::to_string(n) + " boundary limit not 1");
    for (Index k : {-20, 0, 15, 60}) {
      v.require(oracle::rel_err(kernel_R(ws, n, k), oracle::kernel_R(fam, n, k)) < 1e-12,
                "kernel element disagrees with the oracle");
    }
  }
  v.detail << "smallest log partial sum " << smallest << " (threshold " << std::log(1e3)
           << "), worst |limit - 1| " << worst_gap;
  return v;
}

Verdict integral_comparisons() {
  Verdict v;
  double worst = 1e300;
  for (WeightFamily f : kFamilies) {
    const WeightSequence ws = make(f);
    for (const IntegralComparison& c : check_integral_comparisons(ws, TruncationWindow(-500, 500))) {
      v.require(c.pass, std::string(to_string(f)) + " " + c.name);
      worst = std::min(worst, c.worst_margin);
    }
  }
  v.detail << "worst margin " << worst;
  return v;
}

Verdict oracle_agreement() {
  Verdict v;
  double worst_norm = 0.0;
  for (Variant var : {Variant::unbalanced, Variant::balanced}) {
    for (Index n : {-4, -1, 1, 4}) {
      for (Index half : {25, 50, 100}) {
        const TruncationWindow window(-half, half - 1);
        const OperatorMatrix m = assemble_matrix(WeightSequence::logistic(), ModeOperatorSpec{n, var}, window);
        const NormEstimate p = operator_norm(m, 1e-15, 10000);
        const double svd = oracle::largest_singular_value(
            oracle::q_matrix(oracle::Family{WeightFamily::logistic}, n, var, window.k_min(), window.k_max()));
        const double err = std::abs(p.value - svd) / svd;
        worst_norm = std::max(worst_norm, err);
        v.require(err < 1e-9, label(n, var) + " width " + std::to_string(window.width()) + " power " +
                                  std::to_string(p.value) + " svd " + std::to_string(svd));
      }
    }
  }

  std::mt19937_64 rng(7);
  std::uniform_int_distribution<Index> pick_n(-12, 12);
  std::uniform_int_distribution<Index> pick_k(-200, 200);
  std::uniform_int_distribution<std::size_t> pick_f(0, kFamilies.size() - 1);
  double worst_coeff = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const WeightFamily f = kFamilies[pick_f(rng)];
    const Index n = pick_n(rng);
    const Index k = pick_k(rng);
    const WeightSequence ws = make(f);
    const oracle::Family fam{f};
    const double errs[] = {
        oracle::rel_err(w_eval(ws, k), oracle::w(fam, k)),
        oracle::rel_err(S_eval(ws, k), oracle::S(fam, k)),
        oracle::rel_err(a_eval(ws, k), oracle::a(fam, k)),
        oracle::rel_err(c_eval(ws, n, k), oracle::c(fam, n, k)),
        oracle::rel_err(a_balanced_eval(ws, n, k), oracle::a_balanced(fam, n, k)),
    };
    const double e = *std::max_element(std::begin(errs), std::end(errs));
    worst_coeff = std::max(worst_coeff, e);
    v.require(e < 1e-12, std::string(to_string(f)) + " n=" + std::to_string(n) + " k=" + std::to_string(k));
  }
  v.detail << "power vs SVD worst " << worst_norm << ", coefficients worst " << worst_coeff;
  return v;
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;  // 0 when no budget applies
  std::function<Verdict()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "inverse identities", 5.0, inverse_identities},
      {2, "unbalanced norm bounds", 30.0, [] { return norm_bounds(Variant::unbalanced); }},
      {3, "balanced boundedness", 30.0, [] { return norm_bounds(Variant::balanced); }},
      {4, "classical bound", 20.0, classical_bound},
      {5, "trace identity", 1.0, trace_identity},
      {6, "kernel claims", 5.0, kernel_claims},
      {7, "integral comparisons", 2.0, integral_comparisons},
      {8, "oracle agreement", 0.0, oracle_agreement},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail << "exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.budget_seconds == 0.0 || secs < c.budget_seconds;
    const bool pass = v.pass && in_time;
    if (!pass) ++failures;
    std::printf("criterion %d %-24s %s  %.2f s", c.id, c.name, pass ? "PASS" : "FAIL", secs);
    if (c.budget_seconds > 0.0) std::printf(" (budget %.0f s%s)", c.budget_seconds, in_time ? "" : ", exceeded");
    std::printf("  %s\n", v.detail.str().c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
