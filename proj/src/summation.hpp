#pragma once

#include <cmath>
#include <limits>

namespace qdisk::detail {

// Neumaier compensated summation.
class NeumaierSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  // an infinite partial sum would otherwise turn the compensation into NaN
  double value() const { return std::isfinite(sum_) ? sum_ + comp_ : sum_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Running log(sum exp(x_i)).
class LogSumExp {
 public:
  void add(double log_term) {
    if (log_term == -std::numeric_limits<double>::infinity()) return;
    if (log_term > max_) {
      acc_ = acc_ * std::exp(max_ - log_term) + 1.0;
      max_ = log_term;
    } else {
      acc_ += std::exp(log_term - max_);
    }
  }
  double value() const {
    if (acc_ == 0.0) return -std::numeric_limits<double>::infinity();
    return max_ + std::log(acc_);
  }

 private:
  double max_ = -std::numeric_limits<double>::infinity();
  double acc_ = 0.0;
};

// max that lets NaN through instead of dropping it
inline double nan_max(double a, double b) { return (std::isnan(a) || b > a || std::isnan(b)) ? b : a; }

}  // namespace qdisk::detail
