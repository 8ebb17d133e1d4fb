#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace qdisk {

using Index = std::int64_t;
using cplx = std::complex<double>;

/// Invalid parameters or an unparseable run configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An operation was called outside its stated domain (window too small,
/// index outside a user table, ...).
class PreconditionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Closed integer interval [k_min, k_max] used for finite matrix
/// representations and windowed outputs.
class TruncationWindow {
 public:
  TruncationWindow(Index k_min, Index k_max) : k_min_(k_min), k_max_(k_max) {
    if (k_min >= k_max) {
      throw ConfigError("truncation window needs k_min < k_max, got [" + std::to_string(k_min) +
                        ", " + std::to_string(k_max) + "]");
    }
  }

  Index k_min() const { return k_min_; }
  Index k_max() const { return k_max_; }
  Index width() const { return k_max_ - k_min_ + 1; }
  bool contains(Index k) const { return k >= k_min_ && k <= k_max_; }
  std::size_t offset(Index k) const { return static_cast<std::size_t>(k - k_min_); }

  TruncationWindow widened(Index left, Index right) const {
    return TruncationWindow(k_min_ - left, k_max_ + right);
  }

  friend bool operator==(const TruncationWindow&, const TruncationWindow&) = default;

 private:
  Index k_min_;
  Index k_max_;
};

/// Which Hilbert-space norm and mode coefficients are in use.
enum class Variant { unbalanced, balanced };

inline const char* to_string(Variant v) { return v == Variant::balanced ? "balanced" : "unbalanced"; }

}  // namespace qdisk
