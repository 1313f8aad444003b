#pragma once

#include <span>
#include <utility>
#include <vector>

#include "heunpulse/complex_math.hpp"

namespace heunpulse {

/// Dense polynomial with complex coefficients, stored lowest degree first.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<cplx> coeffs) : c_(std::move(coeffs)) { trim(); }
  static Polynomial constant(cplx v) { return Polynomial({v}); }
  /// (z - root)
  static Polynomial linear_factor(cplx root) { return Polynomial({-root, 1.0}); }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  cplx coeff(int k) const {
    return (k >= 0 && k < static_cast<int>(c_.size())) ? c_[k] : cplx{};
  }
  std::span<const cplx> coeffs() const { return c_; }

  cplx operator()(cplx z) const;
  Polynomial derivative() const;

  Polynomial& operator+=(const Polynomial& rhs);
  Polynomial& operator-=(const Polynomial& rhs);
  Polynomial& operator*=(cplx s);
  friend Polynomial operator+(Polynomial lhs, const Polynomial& rhs) { return lhs += rhs; }
  friend Polynomial operator-(Polynomial lhs, const Polynomial& rhs) { return lhs -= rhs; }
  friend Polynomial operator*(Polynomial p, cplx s) { return p *= s; }
  friend Polynomial operator*(cplx s, Polynomial p) { return p *= s; }
  friend Polynomial operator*(const Polynomial& lhs, const Polynomial& rhs);

  Polynomial pow(int n) const;

  /// Quotient and remainder of division by a nonzero polynomial.
  std::pair<Polynomial, Polynomial> divmod(const Polynomial& divisor) const;

 private:
  void trim();
  std::vector<cplx> c_;
};

struct RootOptions {
  double tolerance = 1e-12;
  int max_iterations = 500;
  int polish_iterations = 3;
};

/// All roots of p (degree >= 1) by simultaneous Aberth-Ehrlich iteration,
/// each polished afterwards with a few Newton steps.
std::vector<cplx> polynomial_roots(const Polynomial& p, const RootOptions& opts = {});

}  // namespace heunpulse
