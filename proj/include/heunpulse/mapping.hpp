#pragma once

#include <array>
#include <string>

#include <json.hpp>

#include "heunpulse/classes.hpp"
#include "heunpulse/heun.hpp"

namespace heunpulse {

/// Both roots of alpha_j (1 + k_j + i d_j - alpha_j) = L_j at each singular point z_j in {0, 1, a}.
struct ExponentCandidates {
  /// L_j = lim (z - z_j)^2 U*^2, in closed form from the monomial.
  std::array<cplx, 3> L{};
  /// roots[j] = {first, second}; when L_j = 0 the roots are {0, 1 + k_j + i d_j}.
  std::array<std::array<cplx, 2>, 3> roots{};
};

ExponentCandidates exponent_candidates(const ClassId& id, const ModelParams& p);

/// The pre-factor exponents alpha_1..3 together with which root was taken.
struct ExponentChoice {
  std::array<cplx, 3> alpha{};
  std::array<int, 3> branch{};
};

/// Root index per singular point; throws std::invalid_argument unless each is 0 or 1.
ExponentChoice choose_exponents(const ClassId& id, const ModelParams& p, std::array<int, 3> branch);
/// 0 when it is a root, otherwise the root of smaller |Re| (first on ties).
ExponentChoice default_exponents(const ClassId& id, const ModelParams& p);
/// max_j |alpha_j (1 + k_j + i d_j - alpha_j) - L_j|.
double exponent_residual(const ClassId& id, const ModelParams& p, const ExponentChoice& choice);

/// Heun parameters of a class with their cross-checks.
struct MappedParams {
  ClassId class_id;
  ModelParams params;
  ExponentChoice exponents;
  /// Authoritative values from matching the coefficient identity at the singular points.
  HeunParams hp;
  /// q and alpha*beta from the closed-form Laurent expressions.
  cplx q_printed{};
  cplx alpha_beta_printed{};
  /// max of |q - q_printed| and |alpha*beta - alpha_beta_printed|, relative to scale.
  double printed_discrepancy = 0.0;
  bool discrepancy_flag = false;
  /// Size of the polynomial remainder left after extracting (alpha beta z - q); 0 when all
  /// exponent quadratics hold.
  double matching_remainder = 0.0;
};

/// Throws std::invalid_argument if the exponent residual exceeds 1e-10.
MappedParams heun_params(const ClassId& id, const ModelParams& p, const ExponentChoice& choice);
inline MappedParams heun_params(const ClassId& id, const ModelParams& p) {
  return heun_params(id, p, default_exponents(id, p));
}

/// (2 phi'/phi - i delta*_z - U*'/U*) - (gamma/z + delta/(z-1) + epsilon/(z-a)).
cplx first_derivative_coefficient_residual(const MappedParams& m, cplx z);
/// (phi''/phi + (-i delta*_z - U*'/U*) phi'/phi + U*^2) - (alpha beta z - q)/(z(z-1)(z-a)).
cplx coefficient_identity_residual(const MappedParams& m, cplx z);
/// Scale of the terms entering coefficient_identity_residual at z.
double coefficient_identity_scale(const MappedParams& m, cplx z);

/// Logs of z, z - 1 and z - a on a branch chosen by the caller.
using SingularLogs = std::array<cplx, 3>;
SingularLogs principal_logs(cplx z, cplx a);

/// Value and z-derivative of a2 = phi(z) H(z) for one local Heun solution.
struct A2Value {
  cplx value{};
  cplx dz{};
};

/// The analytic solution a2 = C0 z^alpha1 (z-1)^alpha2 (z-a)^alpha3 H(z) of a class.
///
/// Two local Heun solutions are available at z = 0: mu = 0 and mu = 1 - gamma.
/// The combination cA * (mu = 0) + cB * (mu = 1 - gamma) is evaluated with
/// principal branches; path-dependent evaluation goes through from_heun().
class AnalyticSolution {
 public:
  AnalyticSolution(const ClassId& id, const ModelParams& p, const ExponentChoice& choice);
  explicit AnalyticSolution(const MappedParams& m);

  const MappedParams& mapped() const { return m_; }
  const HeunParams& hp() const { return m_.hp; }
  std::array<cplx, 2> frobenius_exponents() const { return {cplx{0.0}, 1.0 - m_.hp.gamma}; }

  void set_constants(cplx cA, cplx cB) { cA_ = cA, cB_ = cB; }
  cplx cA() const { return cA_; }
  cplx cB() const { return cB_; }

  /// phi from the given logs.
  cplx phi(const SingularLogs& logs) const;
  /// phi'/phi = sum alpha_j / (z - z_j).
  cplx phi_log_derivative(cplx z) const;
  /// a2 and da2/dz of the branch whose Heun value at z is u.
  A2Value from_heun(cplx z, const HeunValue& u, const SingularLogs& logs) const;

  /// One local branch (0: mu = 0, 1: mu = 1 - gamma) on principal branches.
  A2Value branch(int which, cplx z, const HeunEvalOptions& opts = {}) const;
  /// cA * branch(0) + cB * branch(1); branch(1) is skipped when cB = 0.
  A2Value a2(cplx z, const HeunEvalOptions& opts = {}) const;

  /// a1 = i (da2/dz) exp(-i delta(z)) / U*(z) with delta(z) = sum d_j log(z - z_j),
  /// all on the given logs. Throws std::domain_error where U* vanishes.
  cplx a1_from(cplx da2_dz, const SingularLogs& logs) const;
  cplx a1(cplx z, const HeunEvalOptions& opts = {}) const;

 private:
  MappedParams m_;
  BasicModel model_;
  cplx cA_{1.0}, cB_{0.0};
};

nlohmann::json to_json(cplx c);
nlohmann::json to_json(const HeunParams& hp);
nlohmann::json to_json(const MappedParams& m);

}  // namespace heunpulse
