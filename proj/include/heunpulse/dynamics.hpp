#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "heunpulse/fields.hpp"
#include "heunpulse/mapping.hpp"
#include "heunpulse/ode.hpp"

namespace heunpulse {

struct AmplitudePair {
  cplx a1{};
  cplx a2{};
};

/// U(t), delta_t(t) and, for the second-order form, dU/dt.
struct FieldValue {
  cplx U{};
  cplx delta_t{};
  cplx dU_dt{};
};
using FieldFunction = std::function<FieldValue(double)>;

/// Wraps a field configuration (exact evaluation; dU/dt is left at zero).
FieldFunction field_function(const FieldConfiguration& f);

/// Monotone cubic (PCHIP) interpolation of a sampled trace; t must be strictly increasing.
/// dU/dt is the derivative of the interpolant.
FieldFunction interpolated_field(const PulseTrace& trace);

struct Trajectory {
  std::vector<double> t;
  std::vector<cplx> a1, a2;
  /// Accumulated phase delta(t).
  std::vector<cplx> delta;
  /// max | |a1|^2 + |a2|^2 - initial | over the output points.
  double norm_drift = 0.0;
  StepStats stats;
};

/// Integrates i a1' = U e^{-i delta} a2, i a2' = U e^{i delta} a1, delta' = delta_t from t0
/// through each point of t_out (monotone, all on one side of t0). rel_tol must lie in
/// [1e-13, 1e-6]. Throws StepUnderflow (a std::runtime_error) near field singularities.
Trajectory integrate_two_state(const FieldFunction& field, double t0, std::span<const double> t_out,
                               AmplitudePair initial, double rel_tol = 1e-12, cplx delta0 = 0.0);

/// a2'' + (-i delta_t - U'/U) a2' + U^2 a2 = 0 as a first-order system in (a2, a2').
/// Returns {a2, a2'} at every point of t_out.
std::vector<std::pair<cplx, cplx>> integrate_second_order(const FieldFunction& field, double t0,
                                                          std::span<const double> t_out, cplx a2, cplx a2_t,
                                                          double rel_tol = 1e-12);

struct VerifyOptions {
  /// Interval in z for the real constant-detuning transform.
  std::pair<double, double> z_interval{0.05, 0.95};
  /// Interval in t for the other kinds; defaults: one period for the periodic kinds,
  /// [-4, 4] / Delta for the complex line. Required for user-supplied paths.
  std::optional<std::pair<double, double>> t_interval;
  /// Anchor time; defaults to t = 0 (z = 1/2 for the real and line transforms),
  /// or the midpoint of t_interval for user-supplied paths.
  std::optional<double> anchor_t;
  int n_points = 81;
  double rel_tol = 1e-12;
  /// Pre-factor exponent choice; default_exponents when empty.
  std::optional<ExponentChoice> exponents;
};

struct VerificationReport {
  ClassId class_id;
  ModelParams params;
  TransformKind kind = TransformKind::real_constant_detuning;
  HeunParams hp;
  cplx cA{}, cB{};
  /// How each basis solution was obtained: "series mu=..." or "ode seed (u, u')=...".
  std::array<std::string, 2> branches;
  double max_relative_error = 0.0;
  double norm_drift = 0.0;
  /// max and mean of |residual| / scale of the z-form second-order equation for the analytic a2.
  double ode_residual_max = 0.0;
  double ode_residual_mean = 0.0;
  /// Endpoints of the compared z path and the matching t interval.
  cplx z_begin{}, z_end{};
  double t_begin = 0.0, t_end = 0.0;
  double anchor_t = 0.0;
  cplx anchor_z{};
  std::size_t points = 0;
  std::vector<std::string> notes;

  bool passed(double threshold = 1e-5) const { return max_relative_error <= threshold; }
};

/// Compares the analytic solution of a class with direct integration of the two-state system.
/// Throws std::domain_error when the anchor fit is ill-conditioned.
VerificationReport verify_class(const FieldConfiguration& field, const VerifyOptions& options = {});
inline VerificationReport verify_class(const ClassId& id, const ModelParams& p, const TransformSpec& spec,
                                       const VerifyOptions& options = {}) {
  return verify_class(FieldConfiguration::from_spec(id, p, spec), options);
}

nlohmann::json to_json(const VerificationReport& r);

}  // namespace heunpulse
