#pragma once

#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "heunpulse/complex_math.hpp"

namespace heunpulse {

/// Parameters of the general Heun equation
///
///   u'' + (gamma/z + delta/(z-1) + epsilon/(z-a)) u' + (alpha beta z - q)/(z(z-1)(z-a)) u = 0
///
/// subject to the Fuchsian relation 1 + alpha + beta = gamma + delta + epsilon.
struct HeunParams {
  cplx a{2.0};
  cplx q{};
  cplx alpha{}, beta{};
  cplx gamma{1.0}, delta{}, epsilon{};

  cplx fuchsian_residual() const { return 1.0 + alpha + beta - gamma - delta - epsilon; }
  /// Throws std::invalid_argument if a is 0 or 1, or the Fuchsian relation fails by more than tol.
  void validate(double tol = 1e-12) const;
};

/// Raised when R_n vanishes: the requested exponent mu is resonant with the
/// other local solution (log-type Frobenius solutions are not supported).
class ResonanceError : public std::domain_error {
 public:
  ResonanceError(const std::string& what, int index) : std::domain_error(what), index_(index) {}
  int index() const { return index_; }

 private:
  int index_;
};

/// Local Frobenius solution z^mu * sum c_n z^n around z = 0.
struct SeriesSolution {
  cplx mu{};
  std::vector<cplx> coeffs;
  double truncation_error_estimate = 0.0;
};

/// Recurrence coefficients R_n c_n + Q_{n-1} c_{n-1} + P_{n-2} c_{n-2} = 0 of the power series.
struct PowerRecurrence {
  const HeunParams& hp;
  cplx mu;
  cplx R(int n) const;
  cplx Q(int n) const;
  /// Q_n in the grouping (s + gamma + delta + epsilon - 1)(1 + a) - a epsilon - delta; equal to Q(n).
  cplx Q_printed(int n) const;
  cplx P(int n) const;
};

/// The two admissible starting exponents: 0 and 1 - gamma.
bool is_admissible_exponent(const HeunParams& hp, cplx mu, double tol = 1e-12);

/// c_0 .. c_N by forward recursion. Throws ResonanceError if R_n = 0 for 1 <= n <= N
/// and std::invalid_argument if mu is not 0 or 1 - gamma.
SeriesSolution frobenius_coefficients(const HeunParams& hp, cplx mu, int n_max);

/// Value and z-derivative of a Heun solution.
struct HeunValue {
  cplx value{};
  cplx derivative{};
};

struct HeunEvalOptions {
  /// Series is summed directly for |z| <= fraction * min(|a|, 1).
  double series_fraction = 0.9;
  bool allow_continuation = true;
  /// Local relative tolerance of the continuation integrator.
  double rel_tol = 1e-11;
  int max_terms = 10000;
};

/// Radius of convergence of the series at 0: min(|a|, 1).
double series_radius(const HeunParams& hp);

/// Sum of the Frobenius series. `log_z`, when given, selects the branch of z^mu.
/// Throws std::domain_error outside the series disk or on non-convergence.
HeunValue heun_series(const HeunParams& hp, cplx mu, cplx z,
                      std::optional<cplx> log_z = std::nullopt,
                      const HeunEvalOptions& opts = {}, double* tail_estimate = nullptr);

/// Integrates the Heun equation as a first-order system along the straight
/// segment from `from` to `to`, starting with `start` at `from`.
HeunValue heun_propagate(const HeunParams& hp, HeunValue start, cplx from, cplx to,
                         double rel_tol = 1e-11);

/// Continues the series solution along a polygonal path. path.front() must lie
/// inside the series disk; the value is analytically continued through each vertex.
HeunValue heun_continue(const HeunParams& hp, cplx mu, std::span<const cplx> path,
                        const HeunEvalOptions& opts = {});

/// A singularity-avoiding polygonal path from inside the series disk to z.
/// Throws std::runtime_error if none of the candidate paths keeps clear of {0, 1, a}.
std::vector<cplx> plan_continuation_path(const HeunParams& hp, cplx z,
                                         const HeunEvalOptions& opts = {});

/// Series inside the disk, otherwise continuation along plan_continuation_path.
HeunValue heun_eval(const HeunParams& hp, cplx mu, cplx z, const HeunEvalOptions& opts = {});
inline cplx heun_value(const HeunParams& hp, cplx mu, cplx z, const HeunEvalOptions& opts = {}) {
  return heun_eval(hp, mu, z, opts).value;
}

/// Residual of the Heun equation for a given value, first and second derivative.
cplx heun_ode_residual(const HeunParams& hp, cplx z, cplx u, cplx du, cplx d2u);

/// Gauss hypergeometric 2F1(a, b; c; z) by its power series, |z| < 1.
cplx gauss_2f1(cplx a, cplx b, cplx c, cplx z);

/// Expansion u = sum c_n 2F1(alpha, beta; gamma0 - n; z).
struct HypergeometricExpansion {
  cplx gamma0{};
  std::vector<cplx> coeffs;
  /// First n <= N with P_n = 0, i.e. epsilon + gamma - gamma0 = -n.
  std::optional<int> terminating_index;
};

struct HypergeometricRecurrence {
  const HeunParams& hp;
  cplx gamma0;
  cplx R(int n) const;
  cplx Q(int n) const;
  cplx P(int n) const;
};

/// c_0 .. c_N of the hypergeometric expansion. gamma0 must be gamma, alpha or beta;
/// gamma0 - n must avoid nonpositive integers and zero for n <= N.
HypergeometricExpansion hypergeometric_expansion_coeffs(const HeunParams& hp, cplx gamma0, int n_max);

/// Partial sum of the expansion and its derivative at z.
HeunValue hypergeometric_expansion_sum(const HeunParams& hp, const HypergeometricExpansion& e, cplx z);

enum class ExpansionKind { power, hypergeometric };

/// Values of q for which the chosen expansion terminates at n = N.
///
/// `start` is mu (power series) or gamma0 (hypergeometric expansion); hp.q is
/// ignored. The structural condition P_N = 0 must already hold. The N + 1 roots
/// of the termination polynomial are returned, each re-verified by recursion.
std::vector<cplx> q_termination_candidates(const HeunParams& hp, ExpansionKind kind, int N,
                                           cplx start);

/// Writes "n,Re_c,Im_c" rows with a header line.
void write_coefficients_csv(std::ostream& out, std::span<const cplx> coeffs);

}  // namespace heunpulse
