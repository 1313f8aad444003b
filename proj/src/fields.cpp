#include "heunpulse/fields.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <tuple>

#include <boost/math/tools/roots.hpp>

#include "heunpulse/format.hpp"

namespace heunpulse {

std::string to_string(TransformKind kind) {
  switch (kind) {
    case TransformKind::real_constant_detuning: return "real_constant_detuning";
    case TransformKind::complex_line: return "complex_line";
    case TransformKind::periodic_exponential: return "periodic_exponential";
    case TransformKind::periodic_constant_amplitude: return "periodic_constant_amplitude";
    case TransformKind::user_supplied: return "user_supplied";
  }
  return "unknown";
}

TransformKind parse_transform_kind(std::string_view text) {
  for (const auto k : {TransformKind::real_constant_detuning, TransformKind::complex_line,
                       TransformKind::periodic_exponential, TransformKind::periodic_constant_amplitude,
                       TransformKind::user_supplied})
    if (text == to_string(k)) return k;
  if (text == "constant") return TransformKind::real_constant_detuning;
  if (text == "line") return TransformKind::complex_line;
  if (text == "periodic") return TransformKind::periodic_exponential;
  if (text == "amplitude") return TransformKind::periodic_constant_amplitude;
  if (text == "user") return TransformKind::user_supplied;
  throw std::invalid_argument("unknown transform kind '" + std::string(text) + "'");
}

CrossingPolynomial CrossingPolynomial::from(double a, double d1, double d2, double d3) {
  return {d1 + d2 + d3, d1 + a * d1 + a * d2 + d3, a * d1};
}

cplx realizing_u0star(const ClassId& id, double U0) {
  // exp(-i pi (k2 + k3)) with k2 + k3 a multiple of 1/2
  const int quarter_turns = ((-(id.twice_k[1] + id.twice_k[2])) % 4 + 4) % 4;
  static constexpr std::array<cplx, 4> phase{cplx{1, 0}, cplx{0, 1}, cplx{-1, 0}, cplx{0, -1}};
  return U0 * phase[static_cast<std::size_t>(quarter_turns)];
}

namespace {

constexpr double kImagTol = 1e-9;
constexpr double kLogitMax = 700.0;

bool is_real(cplx c) { return c.imag() == 0.0; }

// Monotone root finding: expands a bracket from `start` in steps that double, then
// hands it to a safeguarded Newton iteration. Returns {root, clamped}.
template <class F>
std::pair<double, bool> invert_monotone(F&& f, double target, double bound) {
  double d0 = 0.0;
  const double f0 = f(0.0, &d0) - target;
  if (f0 == 0.0) return {0.0, false};
  const double dir = d0 >= 0.0 ? 1.0 : -1.0;
  // direction in the variable in which the root lies
  const double side = (f0 * dir < 0.0) ? 1.0 : -1.0;
  double near = 0.0, far = side;
  for (;;) {
    double dfar = 0.0;
    const double ffar = f(far, &dfar) - target;
    if (ffar * f0 <= 0.0) break;
    near = far;
    if (std::abs(far) >= bound) return {side * bound, true};
    far = std::clamp(2.0 * far, -bound, bound);
  }
  const double lo = std::min(near, far), hi = std::max(near, far);
  auto fn = [&](double s) {
    double d = 0.0;
    const double v = f(s, &d) - target;
    return std::make_tuple(v, d);
  };
  std::uintmax_t iters = 200;
  const double root = boost::math::tools::newton_raphson_iterate(fn, 0.5 * (lo + hi), lo, hi,
                                                                 std::numeric_limits<double>::digits - 3, iters);
  return {root, false};
}

}  // namespace

ConstantDetuningMap::ConstantDetuningMap(const ModelParams& p) {
  validate(p);
  if (!is_real(p.a) || !is_real(p.d1) || !is_real(p.d2) || !is_real(p.d3))
    throw std::invalid_argument("real constant-detuning map needs real a and d1, d2, d3");
  if (!(p.a.real() > 1.0)) throw std::invalid_argument("real constant-detuning map needs a > 1");
  if (!(p.Delta != 0.0) || !std::isfinite(p.Delta)) throw std::invalid_argument("Delta must be nonzero");
  a_ = p.a.real();
  d1_ = p.d1.real();
  d2_ = p.d2.real();
  d3_ = p.d3.real();
  Delta_ = p.Delta;
  P_ = CrossingPolynomial::from(a_, d1_, d2_, d3_);
  if (P_.A == 0.0 && P_.B == 0.0 && P_.C == 0.0) throw std::domain_error("crossing polynomial vanishes identically");

  // roots of P strictly inside (0, 1) break the one-to-one map
  std::vector<double> roots;
  if (P_.A == 0.0) {
    if (P_.B != 0.0) roots.push_back(P_.C / P_.B);
  } else {
    const double disc = P_.B * P_.B - 4.0 * P_.A * P_.C;
    if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      const double qq = 0.5 * (P_.B + std::copysign(sq, P_.B));
      if (qq != 0.0) roots.push_back(qq / P_.A), roots.push_back(P_.C / qq);
      else roots.push_back(0.0);
    }
  }
  for (const double r : roots)
    if (r > 0.0 && r < 1.0)
      throw std::domain_error("crossing polynomial P(z) vanishes at z = " + format_double(r) +
                              " inside (0, 1): the map between t and z is not one-to-one");

  t0_ = ((d1_ + d2_ + d3_) * std::log(2.0) - d3_ * std::log(2.0 * a_ - 1.0)) / Delta_;
}

double ConstantDetuningMap::t_of_z(double z) const {
  if (!(z > 0.0 && z < 1.0)) throw std::domain_error("t_of_z: z must lie in (0, 1)");
  return t0_ + (d1_ * std::log(z) + d2_ * std::log1p(-z) + d3_ * std::log(a_ - z)) / Delta_;
}

double ConstantDetuningMap::t_of_s(double s, double* dt_ds) const {
  const double log_z = s < 0.0 ? s - std::log1p(std::exp(s)) : -std::log1p(std::exp(-s));
  const double log_w = log_z - s;
  const double z = std::exp(log_z), w = std::exp(log_w);
  if (dt_ds) *dt_ds = (d1_ * w - d2_ * z - d3_ * z * w / (a_ - z)) / Delta_;
  return t0_ + (d1_ * log_z + d2_ * log_w + d3_ * std::log(a_ - z)) / Delta_;
}

ConstantDetuningMap::Point ConstantDetuningMap::z_of_t(double t) const {
  const auto [s, clamped] = invert_monotone([this](double x, double* d) { return t_of_s(x, d); }, t, kLogitMax);
  Point p;
  p.z = s < 0.0 ? std::exp(s) / (1.0 + std::exp(s)) : 1.0 / (1.0 + std::exp(-s));
  p.w = s > 0.0 ? std::exp(-s) / (1.0 + std::exp(-s)) : 1.0 / (1.0 + std::exp(s));
  p.clamped = clamped;
  return p;
}

double ConstantDetuningMap::dz_dt(double z, double w) const { return -Delta_ * z * w * (z - a_) / P_(z); }

ComplexLineMap::ComplexLineMap(const ComplexLineSpec& s) : s_(s) {
  if (s.a0 == 0.0) throw std::invalid_argument("complex line needs a0 != 0");
  if (s.lambda3 == 0.0) throw std::invalid_argument("complex line needs lambda3 != 0");
  // den(y) = (2 l1 + l3) y^2 + 2 (l2 - a0 l1) y + (l3 - 2 a0 l2) must keep its sign on the y-range
  const double A = 2.0 * s.lambda1 + s.lambda3, B = 2.0 * (s.lambda2 - s.a0 * s.lambda1),
               C = s.lambda3 - 2.0 * s.a0 * s.lambda2;
  std::vector<double> roots;
  if (A == 0.0) {
    if (B != 0.0) roots.push_back(-C / B);
  } else {
    const double disc = B * B - 4.0 * A * C;
    if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      roots.push_back((-B + sq) / (2.0 * A));
      roots.push_back((-B - sq) / (2.0 * A));
    }
  }
  for (const double r : roots) {
    const bool inside = s.a0 < 0.0 ? r > s.a0 : r < s.a0;
    if (inside)
      throw std::domain_error("complex-line map: dt/dy vanishes at y = " + format_double(r) +
                              ", t(y) is not monotone");
  }
}

double ComplexLineMap::y_of_v(double v) const { return s_.a0 < 0.0 ? s_.a0 + std::exp(v) : s_.a0 - std::exp(v); }

double ComplexLineMap::denominator(double y) const {
  return 2.0 * (y - s_.a0) * (s_.lambda2 + s_.lambda1 * y) + s_.lambda3 * (1.0 + y * y);
}

double ComplexLineMap::t_of_y(double y) const {
  const bool inside = s_.a0 < 0.0 ? y > s_.a0 : y < s_.a0;
  if (!inside) throw std::domain_error("t_of_y: y outside the range of the complex-line map");
  const double l1 = std::abs(y) > 1e8 ? 2.0 * std::log(std::abs(y)) + std::log1p(1.0 / (y * y)) : std::log1p(y * y);
  return s_.lambda1 * l1 + 2.0 * s_.lambda2 * std::atan(y) + s_.lambda3 * std::log((s_.a0 - y) / s_.a0);
}

double ComplexLineMap::t_of_v(double v, double* dt_dv) const {
  const double y = y_of_v(v);
  if (dt_dv) {
    // den / (1 + y^2) without overflow for large |y|
    double r;
    if (std::abs(y) > 1.0) {
      r = 2.0 * ((y - s_.a0) / y) * (s_.lambda2 / y + s_.lambda1) / (1.0 + 1.0 / (y * y)) + s_.lambda3;
    } else {
      r = denominator(y) / (1.0 + y * y);
    }
    *dt_dv = r;
  }
  const double l1 = std::abs(y) > 1e8 ? 2.0 * std::log(std::abs(y)) + std::log1p(1.0 / (y * y)) : std::log1p(y * y);
  return s_.lambda1 * l1 + 2.0 * s_.lambda2 * std::atan(y) + s_.lambda3 * (v - std::log(std::abs(s_.a0)));
}

double ComplexLineMap::y_of_t(double t) const {
  // shift the unknown so that v = ln|a0| (y = 0) sits at the origin of the search
  const double v0 = std::log(std::abs(s_.a0));
  const auto [x, clamped] =
      invert_monotone([&](double x, double* d) { return t_of_v(x + v0, d); }, t, kLogitMax);
  (void)clamped;
  return y_of_v(x + v0);
}

double ComplexLineMap::dy_dt(double y) const {
  return (1.0 + y * y) * (y - s_.a0) / denominator(y);
}

ModelParams complex_line_model(const ClassId& id, const ComplexLineSpec& s, double Delta) {
  if (!complex_line_admissible(id)) {
    std::string list;
    for (const auto& c : enumerate_classes())
      if (complex_line_admissible(c)) list += (list.empty() ? "" : "; ") + to_string(c);
    throw std::invalid_argument("complex-line transform needs k1 = k2; admissible classes: " + list);
  }
  ModelParams p;
  p.a = cplx{0.5, 0.5 * s.a0};
  p.d1 = Delta * cplx{s.lambda1, -s.lambda2};
  p.d2 = Delta * cplx{s.lambda1, s.lambda2};
  p.d3 = Delta * s.lambda3;
  p.Delta = Delta;
  // (-2i)^(1 + 2 k1 + k3) on the principal branch
  const int twice_exp = 2 + 2 * id.twice_k[0] + id.twice_k[2];
  p.U0star = s.U0 * half_pow(cplx{0.0, -2.0}, twice_exp);
  return p;
}

namespace {

void require_periodic_a(const PeriodicSpec& s) {
  if (!(s.a > 0.0 && s.a < 1.0)) throw std::invalid_argument("periodic transforms need 0 < a < 1");
}

}  // namespace

ModelParams periodic_model(const ClassId& id, const PeriodicSpec& s, double Delta) {
  if (!(id == ClassId{-1, -1, -1} || id == ClassId{0, -2, -2}))
    throw std::invalid_argument("periodic amplitude model exists for classes -1/2,-1/2,-1/2 and 0,-1,-1 only");
  require_periodic_a(s);
  ModelParams p;
  p.a = s.a;
  p.Delta = Delta;
  // i^(-1 - 2 k3)
  p.U0star = s.U0 / Delta * half_pow(I, -2 - 2 * id.twice_k[2]);
  p.d1 = -I;
  return p;
}

ModelParams constant_amplitude_model(const PeriodicSpec& s, double Delta) {
  require_periodic_a(s);
  ModelParams p;
  p.a = s.a;
  p.Delta = Delta;
  p.U0star = -I * s.U0 / Delta;
  p.d1 = -I * s.Delta1 / Delta;
  p.d2 = I * s.Delta2 / Delta;
  p.d3 = -p.d2;
  return p;
}

FieldConfiguration::FieldConfiguration(ClassId id, ModelParams p, TransformSpec spec)
    : id_(id), model_(id, p), spec_(std::move(spec)) {}

FieldConfiguration FieldConfiguration::constant_detuning(const ClassId& id, const ModelParams& p) {
  TransformSpec spec;
  spec.kind = TransformKind::real_constant_detuning;
  spec.Delta = p.Delta;
  FieldConfiguration f(id, p, spec);
  f.cd_ = std::make_shared<const ConstantDetuningMap>(p);
  return f;
}

FieldConfiguration FieldConfiguration::complex_line(const ClassId& id, const ComplexLineSpec& s, double Delta) {
  TransformSpec spec;
  spec.kind = TransformKind::complex_line;
  spec.Delta = Delta;
  spec.line = s;
  FieldConfiguration f(id, complex_line_model(id, s, Delta), spec);
  f.line_ = std::make_shared<const ComplexLineMap>(s);
  return f;
}

FieldConfiguration FieldConfiguration::periodic(const ClassId& id, const PeriodicSpec& s, double Delta) {
  TransformSpec spec;
  spec.kind = TransformKind::periodic_exponential;
  spec.Delta = Delta;
  spec.periodic = s;
  return FieldConfiguration(id, periodic_model(id, s, Delta), spec);
}

FieldConfiguration FieldConfiguration::constant_amplitude(const ClassId& id, const PeriodicSpec& s, double Delta) {
  if (!(id == ClassId{-2, 0, 0}))
    throw std::invalid_argument("constant-amplitude periodic model exists for class -1,0,0 only");
  TransformSpec spec;
  spec.kind = TransformKind::periodic_constant_amplitude;
  spec.Delta = Delta;
  spec.periodic = s;
  return FieldConfiguration(id, constant_amplitude_model(s, Delta), spec);
}

FieldConfiguration FieldConfiguration::generic(const ClassId& id, const ModelParams& p, PathFunction path) {
  if (!path) throw std::invalid_argument("user-supplied transform needs a z(t) callable");
  TransformSpec spec;
  spec.kind = TransformKind::user_supplied;
  spec.Delta = p.Delta;
  spec.path = std::move(path);
  return FieldConfiguration(id, p, spec);
}

FieldConfiguration FieldConfiguration::from_spec(const ClassId& id, const ModelParams& p, const TransformSpec& spec) {
  switch (spec.kind) {
    case TransformKind::real_constant_detuning: {
      ModelParams q = p;
      q.Delta = spec.Delta;
      return constant_detuning(id, q);
    }
    case TransformKind::complex_line: return complex_line(id, spec.line, spec.Delta);
    case TransformKind::periodic_exponential: return periodic(id, spec.periodic, spec.Delta);
    case TransformKind::periodic_constant_amplitude: return constant_amplitude(id, spec.periodic, spec.Delta);
    case TransformKind::user_supplied: return generic(id, p, spec.path);
  }
  throw std::invalid_argument("unknown transform kind");
}

FieldPoint FieldConfiguration::at(double t) const {
  const ModelParams& p = model_.params();
  const double Delta = spec_.Delta;
  FieldPoint out;
  switch (spec_.kind) {
    case TransformKind::real_constant_detuning: {
      const auto pt = cd_->z_of_t(t);
      const double a = p.a.real();
      const double P = cd_->crossing()(pt.z);
      out.z = pt.z;
      out.clamped = pt.clamped;
      out.dz_dt = cd_->dz_dt(pt.z, pt.w);
      // U = Delta U0* z^(k1+1) (z-1)^(k2+1) (z-a)^(k3+1) / P(z)
      out.U_principal = Delta * p.U0star * half_pow(cplx{pt.z}, id_.shifted(0)) *
                        half_pow(cplx{-pt.w}, id_.shifted(1)) * half_pow(cplx{pt.z - a}, id_.shifted(2)) / P;
      out.U = out.U_principal;
      const cplx raw_delta = (p.d1 / pt.z - p.d2 / pt.w + p.d3 / (pt.z - a)) * out.dz_dt;
      out.delta_raw = raw_delta;
      out.delta_t = Delta;
      break;
    }
    case TransformKind::complex_line: {
      const auto& s = spec_.line;
      const double y = line_->y_of_t(t);
      out.z = cplx{0.5, 0.5 * y};
      out.dz_dt = cplx{0.0, 0.5 * line_->dy_dt(y)};
      const cplx ya = half_pow(cplx{y - s.a0}, id_.shifted(2));
      out.U = s.U0 * std::pow(1.0 + y * y, id_.k1() + 1.0) * ya / line_->denominator(y);
      out.U_principal = model_.amplitude(out.z) * out.dz_dt;
      out.delta_raw = model_.detuning(out.z) * out.dz_dt;
      out.delta_t = Delta;
      break;
    }
    case TransformKind::periodic_exponential:
    case TransformKind::periodic_constant_amplitude: {
      const auto& s = spec_.periodic;
      const double ra = std::sqrt(s.a);
      out.z = std::polar(ra, Delta * t);
      out.dz_dt = I * Delta * out.z;
      const double X = 1.0 + s.a - 2.0 * ra * std::cos(Delta * t);
      out.U_principal = model_.amplitude(out.z) * out.dz_dt;
      out.delta_raw = model_.detuning(out.z) * out.dz_dt;
      if (spec_.kind == TransformKind::periodic_exponential) {
        out.U = s.U0 * std::pow(X, id_.k3());
        out.delta_t = Delta;
      } else {
        out.U = s.U0;
        out.delta_t = s.Delta1 + (1.0 - s.a) * s.Delta2 / X;
      }
      break;
    }
    case TransformKind::user_supplied: {
      const PathPoint pp = spec_.path(t);
      out.z = pp.z;
      out.dz_dt = pp.dz_dt;
      out.U_principal = model_.amplitude(pp.z) * pp.dz_dt;
      out.U = out.U_principal;
      out.delta_t = model_.detuning(pp.z) * pp.dz_dt;
      out.delta_raw = out.delta_t;
      break;
    }
  }
  return out;
}

PulseTrace sample(const FieldConfiguration& f, std::span<const double> t_grid) {
  PulseTrace tr;
  tr.class_id = f.class_id();
  tr.params = f.model();
  tr.spec = f.spec();
  const std::size_t n = t_grid.size();
  tr.t.assign(t_grid.begin(), t_grid.end());
  tr.z.resize(n);
  tr.U.resize(n);
  tr.delta_t.resize(n);

  double max_u = 0.0, max_imag = 0.0, max_mismatch = 0.0, max_d = 0.0, max_d_imag = 0.0, max_d_mismatch = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const FieldPoint pt = f.at(t_grid[k]);
    if (pt.clamped) ++tr.clamped_points;
    tr.z[k] = pt.z;
    tr.U[k] = pt.U.real();
    tr.delta_t[k] = pt.delta_t.real();
    max_u = std::max(max_u, std::abs(pt.U));
    max_imag = std::max({max_imag, std::abs(pt.U.imag()), std::abs(pt.U_principal.imag())});
    max_mismatch = std::max(max_mismatch, std::abs(std::abs(pt.U) - std::abs(pt.U_principal)));
    max_d = std::max(max_d, std::abs(pt.delta_t));
    max_d_imag = std::max(max_d_imag, std::abs(pt.delta_t.imag()));
    max_d_mismatch = std::max(max_d_mismatch, std::abs(pt.delta_raw - pt.delta_t));
  }
  const double uscale = std::max(max_u, 1e-300);
  tr.max_imag_ratio = max_u > 0.0 ? max_imag / uscale : 0.0;
  tr.normalization = max_u;
  if (max_u > 0.0 && max_imag > kImagTol * uscale)
    throw std::domain_error("field amplitude is not real: max |Im U| = " + format_double(max_imag) +
                            " vs max |U| = " + format_double(max_u) + " (check the phase of U0*)");
  if (max_u > 0.0 && max_mismatch > kImagTol * uscale)
    throw std::domain_error("field amplitude disagrees with U*(z) dz/dt by " + format_double(max_mismatch));
  const double dscale = std::max(max_d, 1e-300);
  if (max_d > 0.0 && (max_d_imag > kImagTol * dscale || max_d_mismatch > kImagTol * std::max(1.0, dscale)))
    throw std::domain_error("detuning is not real or disagrees with delta*_z dz/dt: max |Im| = " +
                            format_double(max_d_imag) + ", mismatch = " + format_double(max_d_mismatch));
  return tr;
}

PulseTrace sample_generic(const ClassId& id, const ModelParams& p, PathFunction path, std::span<const double> t_grid) {
  return sample(FieldConfiguration::generic(id, p, std::move(path)), t_grid);
}

PulseTrace sample_constant_detuning(const ClassId& id, const ModelParams& p, std::span<const double> t_grid) {
  return sample(FieldConfiguration::constant_detuning(id, p), t_grid);
}

PulseTrace sample_complex_line(const ClassId& id, const ComplexLineSpec& s, std::span<const double> t_grid,
                               double Delta) {
  return sample(FieldConfiguration::complex_line(id, s, Delta), t_grid);
}

PulseTrace sample_periodic(const ClassId& id, const PeriodicSpec& s, std::span<const double> t_grid, double Delta) {
  return sample(FieldConfiguration::periodic(id, s, Delta), t_grid);
}

PulseTrace sample_constant_amplitude(const ClassId& id, const PeriodicSpec& s, std::span<const double> t_grid,
                                     double Delta) {
  return sample(FieldConfiguration::constant_amplitude(id, s, Delta), t_grid);
}

std::string to_string(CrossingKind kind) {
  switch (kind) {
    case CrossingKind::crossing: return "crossing";
    case CrossingKind::glancing: return "glancing";
    case CrossingKind::non_crossing: return "non_crossing";
  }
  return "unknown";
}

DetuningExtremes constant_amplitude_extremes(const PeriodicSpec& s) {
  require_periodic_a(s);
  const double ra = std::sqrt(s.a);
  return {s.Delta1 + (1.0 - s.a) * s.Delta2 / ((1.0 - ra) * (1.0 - ra)),
          s.Delta1 + (1.0 - s.a) * s.Delta2 / ((1.0 + ra) * (1.0 + ra))};
}

CrossingKind classify_crossing(const PeriodicSpec& s, double tol) {
  const auto e = constant_amplitude_extremes(s);
  const double scale = std::max({std::abs(s.Delta1), std::abs(s.Delta2), 1e-300});
  const auto sign = [&](double v) { return std::abs(v) <= tol * scale ? 0 : (v > 0 ? 1 : -1); };
  const int s1 = sign(e.at_cos_plus), s2 = sign(e.at_cos_minus);
  if (s1 * s2 < 0) return CrossingKind::crossing;
  if (s1 == 0 || s2 == 0) return CrossingKind::glancing;
  return CrossingKind::non_crossing;
}

std::array<double, 2> crossing_thresholds(const PeriodicSpec& s) {
  require_periodic_a(s);
  const double ra = std::sqrt(s.a);
  return {-(1.0 - s.a) * s.Delta2 / ((1.0 - ra) * (1.0 - ra)), -(1.0 - s.a) * s.Delta2 / ((1.0 + ra) * (1.0 + ra))};
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  for (std::size_t k = 0; k < n; ++k) out[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
  if (n > 0) out.back() = hi;
  return out;
}

void write_trace_csv(std::ostream& out, const PulseTrace& trace, bool normalize) {
  const double scale = normalize && trace.normalization > 0.0 ? trace.normalization : 1.0;
  out << "t,Re_z,Im_z,U,delta_t\n";
  for (std::size_t k = 0; k < trace.t.size(); ++k) {
    out << format_double(trace.t[k]) << ',' << format_double(trace.z[k].real()) << ','
        << format_double(trace.z[k].imag()) << ',' << format_double(trace.U[k] / scale) << ','
        << format_double(trace.delta_t[k]) << '\n';
  }
}

nlohmann::json trace_metadata(const PulseTrace& trace, bool normalize) {
  auto c = [](cplx v) { return nlohmann::json::array({v.real(), v.imag()}); };
  nlohmann::json spec = {{"kind", to_string(trace.spec.kind)}, {"Delta", trace.spec.Delta}};
  if (trace.spec.kind == TransformKind::complex_line) {
    const auto& s = trace.spec.line;
    spec["a0"] = s.a0;
    spec["lambda"] = {s.lambda1, s.lambda2, s.lambda3};
    spec["U0"] = s.U0;
  } else if (trace.spec.kind == TransformKind::periodic_exponential ||
             trace.spec.kind == TransformKind::periodic_constant_amplitude) {
    const auto& s = trace.spec.periodic;
    spec["a"] = s.a;
    spec["U0"] = s.U0;
    if (trace.spec.kind == TransformKind::periodic_constant_amplitude) {
      spec["Delta1"] = s.Delta1;
      spec["Delta2"] = s.Delta2;
    }
  }
  return {{"class", to_string(trace.class_id)},
          {"class_doubled", trace.class_id.twice_k},
          {"params",
           {{"a", c(trace.params.a)},
            {"U0star", c(trace.params.U0star)},
            {"d1", c(trace.params.d1)},
            {"d2", c(trace.params.d2)},
            {"d3", c(trace.params.d3)},
            {"Delta", trace.params.Delta}}},
          {"transform", spec},
          {"columns", {"t", "Re_z", "Im_z", "U", "delta_t"}},
          {"points", trace.t.size()},
          {"normalization", trace.normalization},
          {"normalized", normalize},
          {"max_imag_ratio", trace.max_imag_ratio},
          {"clamped_points", trace.clamped_points}};
}

}  // namespace heunpulse
