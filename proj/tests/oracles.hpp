#pragma once

// Independent reference computations used only by the tests. None of these
// call into the library's numerical routines.

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
using lcplx = std::complex<long double>;

/// 2F1 by a fixed number of terms in extended precision, no early exit.
inline cplx hyp2f1(cplx a, cplx b, cplx c, cplx z, int terms = 400) {
  lcplx term{1.0L}, sum{1.0L};
  const lcplx la(a), lb(b), lc(c), lz(z);
  for (int n = 0; n < terms; ++n) {
    const long double nn = n;
    term *= (la + nn) * (lb + nn) / ((lc + nn) * (nn + 1.0L)) * lz;
    sum += term;
  }
  return cplx(sum);
}

/// Pochhammer-based Gauss coefficient (a)_n (b)_n / ((c)_n n!).
inline cplx gauss_coefficient(cplx a, cplx b, cplx c, int n) {
  cplx v{1.0};
  for (int k = 0; k < n; ++k) v *= (a + double(k)) * (b + double(k)) / ((c + double(k)) * double(k + 1));
  return v;
}

/// Coefficients of z^mu sum c_n z^n obtained by substituting the series into
///   z(z-1)(z-a) u'' + [g(z-1)(z-a) + d z(z-a) + e z(z-1)] u' + (ab z - q) u = 0
/// and zeroing each power of z in turn.
inline std::vector<cplx> heun_coefficients_by_substitution(cplx a, cplx q, cplx alpha, cplx beta, cplx g, cplx d,
                                                           cplx e, cplx mu, int n_max) {
  const cplx A2[4] = {0.0, a, -(1.0 + a), 1.0};
  const cplx A1[3] = {g * a, -g * (1.0 + a) - d * a - e, g + d + e};
  const cplx A0[2] = {-q, alpha * beta};
  auto pick = [](const cplx* arr, int size, int j) { return (j >= 0 && j < size) ? arr[j] : cplx{}; };
  auto contribution = [&](int m, int n) {
    const cplx s = mu + double(n);
    return pick(A2, 4, m + 1 - n) * s * (s - 1.0) + pick(A1, 3, m - n) * s + pick(A0, 2, m - 1 - n);
  };
  std::vector<cplx> c{1.0};
  for (int m = 1; m <= n_max; ++m) {
    cplx known{};
    for (int n = 0; n < m; ++n) known += contribution(m, n) * c[std::size_t(n)];
    c.push_back(-known / contribution(m, m));
  }
  return c;
}

/// Largest relative residual of the substituted-series equations for given
/// coefficients: each power z^(mu+m-1), m = 1..N, divided by the sum of |terms|.
inline double heun_substitution_residual(cplx a, cplx q, cplx alpha, cplx beta, cplx g, cplx d, cplx e, cplx mu,
                                         const std::vector<cplx>& c) {
  const cplx A2[4] = {0.0, a, -(1.0 + a), 1.0};
  const cplx A1[3] = {g * a, -g * (1.0 + a) - d * a - e, g + d + e};
  const cplx A0[2] = {-q, alpha * beta};
  auto pick = [](const cplx* arr, int size, int j) { return (j >= 0 && j < size) ? arr[j] : cplx{}; };
  double worst = 0.0;
  for (int m = 1; m < static_cast<int>(c.size()); ++m) {
    cplx sum{};
    double mag = 0.0;
    for (int n = 0; n <= m; ++n) {
      const cplx s = mu + double(n);
      const cplx term =
          (pick(A2, 4, m + 1 - n) * s * (s - 1.0) + pick(A1, 3, m - n) * s + pick(A0, 2, m - 1 - n)) * c[std::size_t(n)];
      sum += term;
      mag += std::abs(term);
    }
    if (mag > 0.0) worst = std::max(worst, std::abs(sum) / mag);
  }
  return worst;
}

/// Principal-branch Lambert W0 on x >= 0 by the fixed point w = x e^{-w}
/// (contractive for moderate x).
inline double lambert_w0_fixed_point(double x) {
  double w = 0.5;
  for (int k = 0; k < 2000; ++k) w = x * std::exp(-w);
  return w;
}

/// Composite Simpson rule on [lo, hi] with n (even) panels.
template <class F>
double simpson(F&& f, double lo, double hi, int n = 2000) {
  const double h = (hi - lo) / n;
  double s = f(lo) + f(hi);
  for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * f(lo + k * h);
  return s * h / 3.0;
}

}  // namespace oracle
