#include "heunpulse/polynomial.hpp"

#include <stdexcept>

namespace heunpulse {

void Polynomial::trim() {
  while (!c_.empty() && c_.back() == cplx{}) c_.pop_back();
}

cplx Polynomial::operator()(cplx z) const {
  cplx acc{};
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (c_.size() <= 1) return {};
  std::vector<cplx> d(c_.size() - 1);
  for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
  return Polynomial(std::move(d));
}

Polynomial& Polynomial::operator+=(const Polynomial& rhs) {
  if (rhs.c_.size() > c_.size()) c_.resize(rhs.c_.size());
  for (std::size_t k = 0; k < rhs.c_.size(); ++k) c_[k] += rhs.c_[k];
  trim();
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& rhs) {
  if (rhs.c_.size() > c_.size()) c_.resize(rhs.c_.size());
  for (std::size_t k = 0; k < rhs.c_.size(); ++k) c_[k] -= rhs.c_[k];
  trim();
  return *this;
}

Polynomial& Polynomial::operator*=(cplx s) {
  for (auto& x : c_) x *= s;
  trim();
  return *this;
}

Polynomial operator*(const Polynomial& lhs, const Polynomial& rhs) {
  if (lhs.is_zero() || rhs.is_zero()) return {};
  std::vector<cplx> out(lhs.c_.size() + rhs.c_.size() - 1);
  for (std::size_t i = 0; i < lhs.c_.size(); ++i)
    for (std::size_t j = 0; j < rhs.c_.size(); ++j) out[i + j] += lhs.c_[i] * rhs.c_[j];
  return Polynomial(std::move(out));
}

Polynomial Polynomial::pow(int n) const {
  if (n < 0) throw std::invalid_argument("Polynomial::pow: negative exponent");
  Polynomial result = constant(1.0);
  for (int k = 0; k < n; ++k) result = result * *this;
  return result;
}

std::pair<Polynomial, Polynomial> Polynomial::divmod(const Polynomial& divisor) const {
  if (divisor.is_zero()) throw std::invalid_argument("Polynomial::divmod: division by zero");
  std::vector<cplx> rem = c_;
  const int dd = divisor.degree();
  if (degree() < dd) return {Polynomial{}, *this};
  std::vector<cplx> quot(static_cast<std::size_t>(degree() - dd + 1));
  const cplx lead = divisor.c_.back();
  for (int k = degree() - dd; k >= 0; --k) {
    const cplx factor = rem[static_cast<std::size_t>(k + dd)] / lead;
    quot[static_cast<std::size_t>(k)] = factor;
    for (int j = 0; j <= dd; ++j) rem[static_cast<std::size_t>(k + j)] -= factor * divisor.c_[static_cast<std::size_t>(j)];
  }
  rem.resize(static_cast<std::size_t>(dd));
  return {Polynomial(std::move(quot)), Polynomial(std::move(rem))};
}

std::vector<cplx> polynomial_roots(const Polynomial& p, const RootOptions& opts) {
  const int n = p.degree();
  if (n < 1) throw std::invalid_argument("polynomial_roots: degree must be at least 1");
  const auto c = p.coeffs();
  if (n == 1) return {-c[0] / c[1]};

  // Initial guesses on a circle of Cauchy-bound radius, rotated off the axes.
  double radius = 0.0;
  for (int k = 0; k < n; ++k) radius = std::max(radius, std::abs(c[k] / c[n]));
  radius = 1.0 + radius;
  const double upper = radius;
  // A tighter start radius from the geometric mean of |c0/cn|.
  double start = std::pow(std::abs(c[0] / c[n]), 1.0 / n);
  if (!(start > 0.0) || !std::isfinite(start)) start = 0.5 * upper;

  std::vector<cplx> z(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double angle = 2.0 * pi * k / n + 0.4;
    z[k] = std::polar(start, angle);
  }

  const Polynomial dp = p.derivative();
  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    double max_step = 0.0;
    for (int k = 0; k < n; ++k) {
      const cplx pz = p(z[k]);
      if (pz == cplx{}) continue;
      const cplx ratio = pz / dp(z[k]);
      cplx sum{};
      for (int j = 0; j < n; ++j)
        if (j != k) sum += 1.0 / (z[k] - z[j]);
      const cplx step = ratio / (1.0 - ratio * sum);
      z[k] -= step;
      max_step = std::max(max_step, std::abs(step) / std::max(1.0, std::abs(z[k])));
    }
    if (max_step < opts.tolerance) break;
  }

  for (auto& root : z) {
    for (int k = 0; k < opts.polish_iterations; ++k) {
      const cplx d = dp(root);
      if (d == cplx{}) break;
      const cplx step = p(root) / d;
      if (!std::isfinite(std::abs(step))) break;
      root -= step;
    }
  }
  return z;
}

}  // namespace heunpulse
