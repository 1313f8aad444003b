#pragma once

#include <array>
#include <functional>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "heunpulse/classes.hpp"

namespace heunpulse {

enum class TransformKind {
  real_constant_detuning,
  complex_line,
  periodic_exponential,
  periodic_constant_amplitude,
  user_supplied,
};

std::string to_string(TransformKind kind);
/// Accepts the names produced by to_string and the short forms "constant", "line",
/// "periodic", "amplitude", "user". Throws std::invalid_argument.
TransformKind parse_transform_kind(std::string_view text);

/// z = (1 + i y)/2 with a = (1 + i a0)/2, d1,2 = Delta (lambda1 -/+ i lambda2), d3 = Delta lambda3.
struct ComplexLineSpec {
  double a0 = -2.0;
  double lambda1 = 1.0, lambda2 = 0.0, lambda3 = 2.0;
  double U0 = 1.0;
};

/// z = sqrt(a) exp(i Delta t), 0 < a < 1. Delta1, Delta2 are used by the constant-amplitude model only.
struct PeriodicSpec {
  double a = 0.25;
  double U0 = 1.0;
  double Delta1 = 0.0, Delta2 = 0.0;
};

/// z(t) and dz/dt for user-supplied transformations.
struct PathPoint {
  cplx z{};
  cplx dz_dt{};
};
using PathFunction = std::function<PathPoint(double)>;

/// Everything that defines a field configuration apart from the class and the
/// five model parameters.
struct TransformSpec {
  TransformKind kind = TransformKind::real_constant_detuning;
  double Delta = 1.0;
  ComplexLineSpec line{};
  PeriodicSpec periodic{};
  PathFunction path{};
};

/// Crossing polynomial P(z) = A z^2 - B z + C = d1 (z-1)(z-a) + d2 z (z-a) + d3 z (z-1).
struct CrossingPolynomial {
  double A = 0.0, B = 0.0, C = 0.0;
  static CrossingPolynomial from(double a, double d1, double d2, double d3);
  double operator()(double z) const { return (A * z - B) * z + C; }
  double derivative(double z) const { return 2.0 * A * z - B; }
};

/// U0* = U0 exp(-i pi (k2 + k3)): makes the constant-detuning pulse of a class real on z in (0, 1).
cplx realizing_u0star(const ClassId& id, double U0);

/// The real constant-detuning map
///   t = t0 + (d1 ln z + d2 ln(1-z) + d3 ln(a-z)) / Delta,  z(0) = 1/2.
class ConstantDetuningMap {
 public:
  /// Throws std::invalid_argument unless a is real and > 1 and the d_j are real, and
  /// std::domain_error if P(z) vanishes inside (0, 1).
  explicit ConstantDetuningMap(const ModelParams& p);

  struct Point {
    double z = 0.0;
    /// 1 - z, accurate when z is close to 1.
    double w = 0.0;
    /// The requested t lies beyond the image of (0, 1); z is pinned to the nearest end.
    bool clamped = false;
  };

  double t0() const { return t0_; }
  double a() const { return a_; }
  const CrossingPolynomial& crossing() const { return P_; }

  double t_of_z(double z) const;
  /// Inverse of t_of_z to |dz| <= 1e-12 by safeguarded Newton iteration in s = ln(z/(1-z)).
  Point z_of_t(double t) const;
  /// dz/dt = Delta z (z-1)(z-a) / P(z) from z and w = 1 - z.
  double dz_dt(double z, double w) const;

 private:
  double t_of_s(double s, double* dt_ds) const;

  double a_, d1_, d2_, d3_, Delta_;
  double t0_;
  CrossingPolynomial P_;
};

/// The complex-line map t(y) = lambda1 ln(1+y^2) + 2 lambda2 arctan y + lambda3 ln((a0-y)/a0).
class ComplexLineMap {
 public:
  /// Throws std::invalid_argument for a0 = 0 or lambda3 = 0, and std::domain_error if t(y)
  /// is not monotone on its y-range.
  explicit ComplexLineMap(const ComplexLineSpec& s);

  /// y ranges over (a0, +inf) for a0 < 0 and (-inf, a0) for a0 > 0.
  double t_of_y(double y) const;
  double y_of_t(double t) const;
  /// 2(y - a0)(lambda2 + lambda1 y) + lambda3 (1 + y^2); dt/dy = den / ((1+y^2)(y-a0)).
  double denominator(double y) const;
  double dy_dt(double y) const;

 private:
  double t_of_v(double v, double* dt_dv) const;
  double y_of_v(double v) const;
  ComplexLineSpec s_;
};

/// Model parameters implied by the complex-line bindings.
ModelParams complex_line_model(const ClassId& id, const ComplexLineSpec& s, double Delta);
/// Model parameters of the periodic amplitude models: U0* = i^(-1-2k3) U0/Delta, d1 = -i.
ModelParams periodic_model(const ClassId& id, const PeriodicSpec& s, double Delta);
/// Model parameters of the constant-amplitude model: U0* = -i U0/Delta,
/// d1 = -i Delta1/Delta, d2 = -d3 = i Delta2/Delta.
ModelParams constant_amplitude_model(const PeriodicSpec& s, double Delta);

/// One point of a field configuration.
struct FieldPoint {
  cplx z{};
  cplx dz_dt{};
  /// U on a branch that is continuous in t.
  cplx U{};
  cplx delta_t{};
  /// U*(z) dz/dt with principal branches.
  cplx U_principal{};
  /// delta*_z(z) dz/dt; agrees with delta_t for every consistent transform.
  cplx delta_raw{};
  bool clamped = false;
};

/// A class, its five parameters and a transformation z(t).
class FieldConfiguration {
 public:
  static FieldConfiguration constant_detuning(const ClassId& id, const ModelParams& p);
  static FieldConfiguration complex_line(const ClassId& id, const ComplexLineSpec& s, double Delta = 1.0);
  static FieldConfiguration periodic(const ClassId& id, const PeriodicSpec& s, double Delta = 1.0);
  static FieldConfiguration constant_amplitude(const ClassId& id, const PeriodicSpec& s, double Delta = 1.0);
  /// U*(z) dz/dt on principal branches: the path should not cross the cuts of z^k1,
  /// (z-1)^k2, (z-a)^k3 where the exponents are half-integers.
  static FieldConfiguration generic(const ClassId& id, const ModelParams& p, PathFunction path);
  /// Dispatch on spec.kind; p is used by the real and user-supplied kinds.
  static FieldConfiguration from_spec(const ClassId& id, const ModelParams& p, const TransformSpec& spec);

  const ClassId& class_id() const { return id_; }
  /// The parameters seen by the analytic solution (after any bindings).
  const ModelParams& model() const { return model_.params(); }
  const TransformSpec& spec() const { return spec_; }
  TransformKind kind() const { return spec_.kind; }

  FieldPoint at(double t) const;

 private:
  FieldConfiguration(ClassId id, ModelParams p, TransformSpec spec);

  ClassId id_;
  BasicModel model_;
  TransformSpec spec_;
  std::shared_ptr<const ConstantDetuningMap> cd_;
  std::shared_ptr<const ComplexLineMap> line_;
};

struct PulseTrace {
  std::vector<double> t;
  std::vector<cplx> z;
  std::vector<double> U;
  std::vector<double> delta_t;

  ClassId class_id;
  ModelParams params;
  TransformSpec spec;
  /// max |Im U| / max |U| before projection onto the real axis.
  double max_imag_ratio = 0.0;
  /// max |U|; the data itself is never rescaled.
  double normalization = 1.0;
  std::size_t clamped_points = 0;
};

/// Samples a configuration on t_grid. Throws std::domain_error if U or delta_t is not
/// real to 1e-9 relative (reporting the worst imaginary part).
PulseTrace sample(const FieldConfiguration& f, std::span<const double> t_grid);

PulseTrace sample_generic(const ClassId& id, const ModelParams& p, PathFunction path, std::span<const double> t_grid);
PulseTrace sample_constant_detuning(const ClassId& id, const ModelParams& p, std::span<const double> t_grid);
PulseTrace sample_complex_line(const ClassId& id, const ComplexLineSpec& s, std::span<const double> t_grid,
                               double Delta = 1.0);
PulseTrace sample_periodic(const ClassId& id, const PeriodicSpec& s, std::span<const double> t_grid,
                           double Delta = 1.0);
PulseTrace sample_constant_amplitude(const ClassId& id, const PeriodicSpec& s, std::span<const double> t_grid,
                                     double Delta = 1.0);

enum class CrossingKind { crossing, glancing, non_crossing };
std::string to_string(CrossingKind kind);

/// Extremes of the constant-amplitude detuning, Delta1 + (1-a) Delta2 / (1 -/+ sqrt a)^2.
struct DetuningExtremes {
  double at_cos_plus = 0.0;
  double at_cos_minus = 0.0;
};
DetuningExtremes constant_amplitude_extremes(const PeriodicSpec& s);
/// Sign analysis of the detuning extremes; a zero within tol * scale counts as touching.
CrossingKind classify_crossing(const PeriodicSpec& s, double tol = 1e-12);
/// The two values of Delta1 at which the classification changes.
std::array<double, 2> crossing_thresholds(const PeriodicSpec& s);

std::vector<double> linspace(double lo, double hi, std::size_t n);

/// Writes "t,Re_z,Im_z,U,delta_t" with 17 significant digits; normalize divides U by max |U|.
void write_trace_csv(std::ostream& out, const PulseTrace& trace, bool normalize = false);
nlohmann::json trace_metadata(const PulseTrace& trace, bool normalize = false);

}  // namespace heunpulse
