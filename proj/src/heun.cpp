#include "heunpulse/heun.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <string>

#include "heunpulse/format.hpp"
#include "heunpulse/ode.hpp"
#include "heunpulse/polynomial.hpp"

namespace heunpulse {

namespace {

constexpr double kTermTol = 1e-15;
constexpr int kQuietTerms = 3;

bool near_nonpositive_integer(cplx c, double tol = 1e-13) {
  const double r = std::round(c.real());
  return r <= 0.0 && std::abs(c - cplx{r, 0.0}) <= tol;
}

double param_scale(const HeunParams& hp) {
  return std::max({1.0, std::abs(hp.alpha), std::abs(hp.beta), std::abs(hp.gamma),
                   std::abs(hp.delta), std::abs(hp.epsilon)});
}

std::string cstr(cplx c) {
  return "(" + format_double(c.real()) + "," + format_double(c.imag()) + ")";
}

}  // namespace

void HeunParams::validate(double tol) const {
  if (std::abs(a) < 1e-14 || std::abs(a - 1.0) < 1e-14)
    throw std::invalid_argument("Heun parameter a must differ from 0 and 1");
  const double r = std::abs(fuchsian_residual());
  if (!(r <= tol * param_scale(*this)))
    throw std::invalid_argument("Fuchsian relation 1 + alpha + beta = gamma + delta + epsilon violated by " +
                                format_double(r));
}

cplx PowerRecurrence::R(int n) const {
  const cplx s = mu + static_cast<double>(n);
  return hp.a * s * (s - 1.0 + hp.gamma);
}

cplx PowerRecurrence::Q(int n) const {
  const cplx s = mu + static_cast<double>(n);
  return -hp.q - s * ((s - 1.0 + hp.gamma) * (1.0 + hp.a) + hp.a * hp.delta + hp.epsilon);
}

cplx PowerRecurrence::Q_printed(int n) const {
  const cplx s = mu + static_cast<double>(n);
  return -hp.q - s * ((s - 1.0 + hp.gamma + hp.delta + hp.epsilon) * (1.0 + hp.a) - hp.a * hp.epsilon - hp.delta);
}

cplx PowerRecurrence::P(int n) const {
  const cplx s = mu + static_cast<double>(n);
  return (s + hp.alpha) * (s + hp.beta);
}

bool is_admissible_exponent(const HeunParams& hp, cplx mu, double tol) {
  return std::abs(mu) <= tol || std::abs(mu - (1.0 - hp.gamma)) <= tol;
}

namespace {

void require_exponent(const HeunParams& hp, cplx mu) {
  if (!is_admissible_exponent(hp, mu))
    throw std::invalid_argument("Frobenius exponent must be 0 or 1 - gamma, got " + cstr(mu));
}

/// Streams c_n of the power series one at a time.
class CoefficientStream {
 public:
  CoefficientStream(const HeunParams& hp, cplx mu) : rec_{hp, mu} {}

  cplx next() {
    cplx c;
    if (n_ == 0) {
      c = 1.0;
    } else {
      const cplx r = rec_.R(n_);
      if (std::abs(r) <= 1e-14 * std::max(1.0, std::abs(rec_.hp.a)) * (1.0 + n_ * n_))
        throw ResonanceError("resonant Frobenius exponent: R_" + std::to_string(n_) + " = 0", n_);
      c = -(rec_.Q(n_ - 1) * c1_ + (n_ >= 2 ? rec_.P(n_ - 2) * c2_ : cplx{})) / r;
    }
    c2_ = c1_;
    c1_ = c;
    ++n_;
    return c;
  }

 private:
  PowerRecurrence rec_;
  int n_ = 0;
  cplx c1_{}, c2_{};
};

}  // namespace

SeriesSolution frobenius_coefficients(const HeunParams& hp, cplx mu, int n_max) {
  if (n_max < 0) throw std::invalid_argument("frobenius_coefficients: N must be nonnegative");
  require_exponent(hp, mu);
  SeriesSolution out;
  out.mu = mu;
  out.coeffs.reserve(static_cast<std::size_t>(n_max) + 1);
  CoefficientStream stream(hp, mu);
  for (int n = 0; n <= n_max; ++n) out.coeffs.push_back(stream.next());
  // size of the last retained term at half the convergence radius
  out.truncation_error_estimate = std::abs(out.coeffs.back()) * std::pow(0.5 * series_radius(hp), n_max);
  return out;
}

double series_radius(const HeunParams& hp) { return std::min(std::abs(hp.a), 1.0); }

HeunValue heun_series(const HeunParams& hp, cplx mu, cplx z, std::optional<cplx> log_z,
                      const HeunEvalOptions& opts, double* tail_estimate) {
  require_exponent(hp, mu);
  const double radius = series_radius(hp);
  if (!(std::abs(z) < radius))
    throw std::domain_error("heun_series: |z| outside the disk of convergence");

  CoefficientStream stream(hp, mu);
  if (z == cplx{}) {
    if (std::abs(mu) > 0.0) throw std::domain_error("heun_series: z = 0 is a branch point for mu != 0");
    stream.next();
    if (tail_estimate) *tail_estimate = 0.0;
    return {1.0, stream.next()};
  }

  // sum_n c_n z^n and sum_n (mu + n) c_n z^n.
  cplx sum{}, dsum{};
  cplx zn{1.0};
  int quiet = 0;
  double last_term = 0.0;
  int n = 0;
  for (; n < opts.max_terms; ++n) {
    const cplx term = stream.next() * zn;
    sum += term;
    dsum += (mu + static_cast<double>(n)) * term;
    last_term = std::max(std::abs(term), std::abs((mu + static_cast<double>(n)) * term));
    const double scale = std::max(std::abs(sum), std::abs(dsum));
    quiet = (last_term < kTermTol * scale) ? quiet + 1 : 0;
    if (quiet >= kQuietTerms) break;
    zn *= z;
  }
  if (n >= opts.max_terms)
    throw std::domain_error("heun_series: no convergence within " + std::to_string(opts.max_terms) + " terms");

  if (tail_estimate) {
    const double ratio = std::abs(z) / radius;
    const double scale = std::max(std::abs(sum), 1e-300);
    *tail_estimate = last_term * ratio / (1.0 - ratio) / scale;
  }

  const cplx lz = log_z ? *log_z : std::log(z);
  const cplx zmu = std::abs(mu) == 0.0 ? cplx{1.0} : std::exp(mu * lz);
  return {zmu * sum, zmu * dsum / z};
}

cplx heun_ode_residual(const HeunParams& hp, cplx z, cplx u, cplx du, cplx d2u) {
  const cplx p = hp.gamma / z + hp.delta / (z - 1.0) + hp.epsilon / (z - hp.a);
  const cplx qq = (hp.alpha * hp.beta * z - hp.q) / (z * (z - 1.0) * (z - hp.a));
  return d2u + p * du + qq * u;
}

HeunValue heun_propagate(const HeunParams& hp, HeunValue start, cplx from, cplx to, double rel_tol) {
  const cplx h = to - from;
  if (h == cplx{}) return start;
  auto rhs = [&](double s, const ComplexState<2>& y) {
    const cplx z = from + s * h;
    const cplx p = hp.gamma / z + hp.delta / (z - 1.0) + hp.epsilon / (z - hp.a);
    const cplx qq = (hp.alpha * hp.beta * z - hp.q) / (z * (z - 1.0) * (z - hp.a));
    return ComplexState<2>{h * y[1], -h * (p * y[1] + qq * y[0])};
  };
  const double mag = std::max({std::abs(start.value), std::abs(start.derivative * h), 1e-300});
  const OdeTolerance tol{rel_tol, 1e-3 * rel_tol * mag};
  const auto y = integrate_complex_to<2>(rhs, ComplexState<2>{start.value, start.derivative}, 0.0, 1.0, tol);
  return {y[0], y[1]};
}

HeunValue heun_continue(const HeunParams& hp, cplx mu, std::span<const cplx> path, const HeunEvalOptions& opts) {
  if (path.empty()) throw std::invalid_argument("heun_continue: empty path");
  const double radius = series_radius(hp);
  if (!(std::abs(path.front()) <= opts.series_fraction * radius))
    throw std::domain_error("heun_continue: path must start inside the series disk");
  HeunValue v = heun_series(hp, mu, path.front(), std::nullopt, opts);
  for (std::size_t k = 1; k < path.size(); ++k) v = heun_propagate(hp, v, path[k - 1], path[k], opts.rel_tol);
  return v;
}

namespace {

double segment_distance(cplx p, cplx a, cplx b) {
  const cplx d = b - a;
  const double len2 = std::norm(d);
  if (len2 == 0.0) return std::abs(p - a);
  const double s = std::clamp(((p - a) * std::conj(d)).real() / len2, 0.0, 1.0);
  return std::abs(p - (a + s * d));
}

bool path_clear(const std::vector<cplx>& path, const std::array<cplx, 3>& sing, double clearance) {
  const cplx target = path.back();
  for (std::size_t k = 1; k < path.size(); ++k) {
    const bool last = k + 1 == path.size();
    for (const cplx s : sing) {
      const double need = last ? std::min(clearance, (1.0 - 1e-9) * std::abs(target - s)) : clearance;
      if (segment_distance(s, path[k - 1], path[k]) < need) return false;
    }
  }
  return true;
}

}  // namespace

std::vector<cplx> plan_continuation_path(const HeunParams& hp, cplx z, const HeunEvalOptions&) {
  const std::array<cplx, 3> sing{cplx{0.0}, cplx{1.0}, hp.a};
  for (const cplx s : sing)
    if (std::abs(z - s) < 1e-14) throw std::domain_error("heun_value: z is a singular point");
  const double gap = std::min({std::abs(hp.a), std::abs(hp.a - 1.0), 1.0});
  const double clearance = 0.1 * gap;
  const double radius = series_radius(hp);
  const double seed_r = 0.5 * radius;
  const double base_angle = std::arg(z);

  static constexpr std::array<double, 7> seed_turns{0.0, 0.25, -0.25, 0.5, -0.5, 0.75, 1.0};
  static constexpr std::array<double, 8> offsets{0.25, -0.25, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0};
  for (const double turn : seed_turns) {
    const cplx seed = std::polar(seed_r, base_angle + turn * pi);
    std::vector<cplx> straight{seed, z};
    if (path_clear(straight, sing, clearance)) return straight;
    const cplx d = z - seed;
    const double len = std::abs(d);
    const cplx normal = I * d / len;
    const cplx mid = 0.5 * (seed + z);
    for (const double o : offsets) {
      std::vector<cplx> bent{seed, mid + o * len * normal, z};
      if (path_clear(bent, sing, clearance)) return bent;
    }
  }
  throw std::runtime_error("heun_value: no singularity-avoiding continuation path found");
}

HeunValue heun_eval(const HeunParams& hp, cplx mu, cplx z, const HeunEvalOptions& opts) {
  const double radius = series_radius(hp);
  if (std::abs(z) <= opts.series_fraction * radius) return heun_series(hp, mu, z, std::nullopt, opts);
  if (!opts.allow_continuation)
    throw std::domain_error("heun_value: z outside the series disk and continuation disabled");
  const auto path = plan_continuation_path(hp, z, opts);
  return heun_continue(hp, mu, path, opts);
}

cplx gauss_2f1(cplx a, cplx b, cplx c, cplx z) {
  if (near_nonpositive_integer(c)) throw std::domain_error("gauss_2f1: c is a nonpositive integer");
  const bool terminates = near_nonpositive_integer(a) || near_nonpositive_integer(b);
  if (!terminates && !(std::abs(z) < 1.0)) throw std::domain_error("gauss_2f1: |z| >= 1 outside the series domain");
  cplx term{1.0}, sum{1.0};
  int quiet = 0;
  for (int n = 0; n < 100000; ++n) {
    const double nn = n;
    term *= (a + nn) * (b + nn) / ((c + nn) * (nn + 1.0)) * z;
    sum += term;
    quiet = std::abs(term) < kTermTol * std::abs(sum) ? quiet + 1 : 0;
    if (quiet >= kQuietTerms || term == cplx{}) return sum;
  }
  throw std::domain_error("gauss_2f1: series did not converge");
}

cplx HypergeometricRecurrence::R(int n) const {
  const double nn = n;
  return hp.a / (gamma0 - nn) * (hp.gamma - gamma0 + nn) * (hp.alpha - gamma0 + nn) * (hp.beta - gamma0 + nn);
}

cplx HypergeometricRecurrence::Q(int n) const {
  const double nn = n;
  return (1.0 - hp.a) * (hp.epsilon + hp.gamma - gamma0 + nn) * (gamma0 - nn - 1.0) +
         hp.a * (hp.gamma - gamma0 + nn) * (hp.alpha + hp.beta - gamma0 + nn) + hp.alpha * hp.beta * hp.a - hp.q;
}

cplx HypergeometricRecurrence::P(int n) const {
  const double nn = n;
  return (hp.a - 1.0) * (hp.epsilon + hp.gamma - gamma0 + nn) * (gamma0 - nn - 1.0);
}

namespace {

void require_gamma0(const HeunParams& hp, cplx gamma0, int n_max) {
  const double tol = 1e-12 * param_scale(hp);
  if (std::abs(gamma0 - hp.gamma) > tol && std::abs(gamma0 - hp.alpha) > tol && std::abs(gamma0 - hp.beta) > tol)
    throw std::invalid_argument("hypergeometric expansion: gamma0 must equal gamma, alpha or beta");
  for (int n = 0; n <= n_max + 2; ++n)
    if (near_nonpositive_integer(gamma0 - static_cast<double>(n), 1e-12))
      throw std::invalid_argument("hypergeometric expansion: gamma0 - " + std::to_string(n) +
                                  " is a nonpositive integer");
}

std::optional<int> first_vanishing_P(const HypergeometricRecurrence& rec, int n_max) {
  for (int n = 0; n <= n_max; ++n) {
    const cplx v = rec.hp.epsilon + rec.hp.gamma - rec.gamma0 + static_cast<double>(n);
    if (std::abs(v) <= 1e-12 * param_scale(rec.hp)) return n;
  }
  return std::nullopt;
}

}  // namespace

HypergeometricExpansion hypergeometric_expansion_coeffs(const HeunParams& hp, cplx gamma0, int n_max) {
  if (n_max < 0) throw std::invalid_argument("hypergeometric_expansion_coeffs: N must be nonnegative");
  require_gamma0(hp, gamma0, n_max);
  const HypergeometricRecurrence rec{hp, gamma0};
  HypergeometricExpansion out;
  out.gamma0 = gamma0;
  out.coeffs.assign(static_cast<std::size_t>(n_max) + 1, cplx{});
  out.coeffs[0] = 1.0;
  for (int n = 1; n <= n_max; ++n) {
    const cplx r = rec.R(n);
    if (r == cplx{} || std::abs(r) <= 1e-14 * param_scale(hp))
      throw ResonanceError("hypergeometric expansion: R_" + std::to_string(n) + " = 0", n);
    const auto k = static_cast<std::size_t>(n);
    out.coeffs[k] = -(rec.Q(n - 1) * out.coeffs[k - 1] + (n >= 2 ? rec.P(n - 2) * out.coeffs[k - 2] : cplx{})) / r;
  }
  out.terminating_index = first_vanishing_P(rec, n_max);
  return out;
}

HeunValue hypergeometric_expansion_sum(const HeunParams& hp, const HypergeometricExpansion& e, cplx z) {
  HeunValue v;
  const cplx ab = hp.alpha * hp.beta;
  for (std::size_t n = 0; n < e.coeffs.size(); ++n) {
    const cplx c = e.gamma0 - static_cast<double>(n);
    v.value += e.coeffs[n] * gauss_2f1(hp.alpha, hp.beta, c, z);
    v.derivative += e.coeffs[n] * ab / c * gauss_2f1(hp.alpha + 1.0, hp.beta + 1.0, c + 1.0, z);
  }
  return v;
}

namespace {

struct RecurrenceFns {
  std::function<cplx(int)> R, Q, P;
};

RecurrenceFns recurrence_for(const HeunParams& hp, ExpansionKind kind, cplx start) {
  if (kind == ExpansionKind::power) {
    require_exponent(hp, start);
    const PowerRecurrence rec{hp, start};
    return {[rec](int n) { return rec.R(n); }, [rec](int n) { return rec.Q(n); },
            [rec](int n) { return rec.P(n); }};
  }
  const HypergeometricRecurrence rec{hp, start};
  return {[rec](int n) { return rec.R(n); }, [rec](int n) { return rec.Q(n); },
          [rec](int n) { return rec.P(n); }};
}

}  // namespace

std::vector<cplx> q_termination_candidates(const HeunParams& hp_in, ExpansionKind kind, int N, cplx start) {
  if (N < 0) throw std::invalid_argument("q_termination_candidates: N must be nonnegative");
  HeunParams hp = hp_in;
  hp.q = 0.0;
  if (kind == ExpansionKind::hypergeometric) require_gamma0(hp, start, N);
  const auto fns = recurrence_for(hp, kind, start);

  const double pscale = param_scale(hp) * param_scale(hp) * std::max(1.0, std::abs(hp.a)) * (1.0 + N);
  if (std::abs(fns.P(N)) > 1e-10 * pscale)
    throw std::invalid_argument("q_termination_candidates: structural termination condition P_N = 0 not met (|P_N| = " +
                                format_double(std::abs(fns.P(N))) + ")");

  // Every Q_n is (Q_n at q = 0) - q; carry c_n as polynomials in q.
  const Polynomial minus_q({cplx{}, cplx{-1.0}});
  auto Qpoly = [&](int n) { return Polynomial::constant(fns.Q(n)) + minus_q; };
  std::vector<Polynomial> c;
  c.push_back(Polynomial::constant(1.0));
  for (int n = 1; n <= N; ++n) {
    const cplx r = fns.R(n);
    if (std::abs(r) <= 1e-14 * pscale) throw ResonanceError("q_termination_candidates: R_" + std::to_string(n) + " = 0", n);
    Polynomial next = Qpoly(n - 1) * c[static_cast<std::size_t>(n - 1)];
    if (n >= 2) next += fns.P(n - 2) * c[static_cast<std::size_t>(n - 2)];
    c.push_back(next * (-1.0 / r));
  }
  Polynomial F = Qpoly(N) * c[static_cast<std::size_t>(N)];
  if (N >= 1) F += fns.P(N - 1) * c[static_cast<std::size_t>(N - 1)];
  if (F.degree() != N + 1) throw std::runtime_error("q_termination_candidates: degenerate termination polynomial");

  std::vector<cplx> roots = polynomial_roots(F);
  std::sort(roots.begin(), roots.end(), [](cplx x, cplx y) {
    return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
  });

  for (const cplx q : roots) {
    HeunParams probe = hp;
    probe.q = q;
    const auto f = recurrence_for(probe, kind, start);
    std::vector<cplx> cn{1.0};
    double cmax = 1.0;
    for (int n = 1; n <= N + 2; ++n) {
      const auto k = static_cast<std::size_t>(n);
      const cplx v = -(f.Q(n - 1) * cn[k - 1] + (n >= 2 ? f.P(n - 2) * cn[k - 2] : cplx{})) / f.R(n);
      cn.push_back(v);
      if (n <= N) cmax = std::max(cmax, std::abs(v));
    }
    const double tail = std::max(std::abs(cn[static_cast<std::size_t>(N + 1)]), std::abs(cn[static_cast<std::size_t>(N + 2)]));
    if (tail > 1e-10 * cmax)
      throw std::runtime_error("q_termination_candidates: root q = " + cstr(q) +
                               " fails the recurrence check (|c_{N+1}|, |c_{N+2}| = " + format_double(tail) + ")");
  }
  return roots;
}

void write_coefficients_csv(std::ostream& out, std::span<const cplx> coeffs) {
  out << "n,Re_c,Im_c\n";
  for (std::size_t n = 0; n < coeffs.size(); ++n)
    out << n << ',' << format_double(coeffs[n].real()) << ',' << format_double(coeffs[n].imag()) << '\n';
}

}  // namespace heunpulse
