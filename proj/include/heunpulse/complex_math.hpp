#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace heunpulse {

using cplx = std::complex<double>;

inline constexpr cplx I{0.0, 1.0};
inline constexpr double pi = std::numbers::pi;

/// w^n for integer n by repeated squaring (exact for small n, no branch issues).
inline cplx ipow(cplx w, int n) {
  if (n < 0) return 1.0 / ipow(w, -n);
  cplx result{1.0, 0.0};
  while (n > 0) {
    if (n & 1) result *= w;
    w *= w;
    n >>= 1;
  }
  return result;
}

/// w^(m/2) on the principal branch; m is a doubled half-integer exponent.
inline cplx half_pow(cplx w, int twice_exponent) {
  if (twice_exponent % 2 == 0) return ipow(w, twice_exponent / 2);
  // m odd: w^(m/2) = sqrt(w) * w^((m-1)/2)
  return std::sqrt(w) * ipow(w, (twice_exponent - 1) / 2);
}

/// exp(exponent * log_w) where log_w is any branch of log(w).
inline cplx pow_from_log(cplx log_w, cplx exponent) {
  return std::exp(exponent * log_w);
}

/// A logarithm followed continuously along a sequence of points.
///
/// The first call fixes the branch (principal, unless an explicit start value
/// is given); every later point is unwrapped against the previous one, so the
/// tracked log jumps only if two consecutive points straddle the origin.
class TrackedLog {
 public:
  TrackedLog() = default;
  explicit TrackedLog(cplx w) : prev_(w), log_(std::log(w)), started_(true) {}
  TrackedLog(cplx w, cplx log_w) : prev_(w), log_(log_w), started_(true) {}

  cplx update(cplx w) {
    if (!started_) {
      *this = TrackedLog(w);
      return log_;
    }
    const cplx step = std::log(w / prev_);
    log_ += step;
    prev_ = w;
    return log_;
  }

  cplx value() const { return log_; }
  bool started() const { return started_; }

 private:
  cplx prev_{1.0, 0.0};
  cplx log_{0.0, 0.0};
  bool started_ = false;
};

/// Scale used for mixed absolute/relative comparisons.
inline double rel_diff(cplx x, cplx y) {
  const double scale = std::max({std::abs(x), std::abs(y), 1e-300});
  return std::abs(x - y) / scale;
}

}  // namespace heunpulse
