#include "heunpulse/pulseshape.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/special_functions/lambert_w.hpp>

namespace heunpulse {

namespace {

constexpr double kBoundaryTol = 1e-12;

// Real roots of c2 x^2 + c1 x + c0; a tiny negative discriminant is read as a double root.
std::vector<double> real_quadratic_roots(double c2, double c1, double c0) {
  if (c2 == 0.0) {
    if (c1 == 0.0) return {};
    return {-c0 / c1};
  }
  double disc = c1 * c1 - 4.0 * c2 * c0;
  const double scale = std::max(c1 * c1, std::abs(4.0 * c2 * c0));
  if (disc < 0.0) {
    if (disc < -1e-14 * scale) return {};
    disc = 0.0;
  }
  const double sq = std::sqrt(disc);
  if (sq == 0.0) return {-c1 / (2.0 * c2)};
  const double q = -0.5 * (c1 + std::copysign(sq, c1));
  std::vector<double> r{q / c2, c0 / q};
  std::sort(r.begin(), r.end());
  return r;
}

double log_ratio(double a) {
  if (!(a > 1.0)) throw std::domain_error("a must be > 1");
  return std::log1p(-1.0 / a);
}

struct RealParams {
  double a, d1, d2, d3, Delta;
};

RealParams real_params(const ModelParams& p) {
  if (p.a.imag() != 0.0 || p.d1.imag() != 0.0 || p.d2.imag() != 0.0 || p.d3.imag() != 0.0)
    throw std::invalid_argument("edge approximations need real a and d1, d2, d3");
  if (!(p.a.real() > 1.0)) throw std::invalid_argument("edge approximations need a > 1");
  return {p.a.real(), p.d1.real(), p.d2.real(), p.d3.real(), p.Delta};
}

double t0_of(const RealParams& r) {
  return ((r.d1 + r.d2 + r.d3) * std::log(2.0) - r.d3 * std::log(2.0 * r.a - 1.0)) / r.Delta;
}

}  // namespace

double crossing_discriminant(double a, double d1, double d2, double d3) {
  const auto P = CrossingPolynomial::from(a, d1, d2, d3);
  return P.B * P.B - 4.0 * P.A * P.C;
}

std::vector<NarrowPulseRoot> narrow_pulse_roots(FreeParameter free, double a, double d1, double d2, double d3) {
  std::vector<double> values;
  if (free == FreeParameter::d3) {
    const double B0 = d1 * (1.0 + a) + a * d2, S = d1 + d2;
    values = real_quadratic_roots(1.0, 2.0 * B0 - 4.0 * a * d1, B0 * B0 - 4.0 * a * d1 * S);
  } else {
    const double A = d1 + d2 + d3, s = d1 + d2, r = d1 + d3;
    const double c2 = s * s, c1 = 2.0 * r * s - 4.0 * d1 * A, c0 = r * r;
    if (c2 == 0.0 && c1 == 0.0) {
      if (c0 == 0.0) throw std::invalid_argument("discriminant vanishes for every a");
      return {};
    }
    values = real_quadratic_roots(c2, c1, c0);
  }

  std::vector<NarrowPulseRoot> out;
  for (const double v : values) {
    NarrowPulseRoot root;
    root.value = v;
    const double aa = free == FreeParameter::a ? v : a;
    const double dd3 = free == FreeParameter::d3 ? v : d3;
    const auto P = CrossingPolynomial::from(aa, d1, d2, dd3);
    root.discriminant = std::abs(P.B * P.B - 4.0 * P.A * P.C);
    if (P.A == 0.0) {
      if (P.B == 0.0) throw std::invalid_argument("crossing polynomial degenerates to a constant (A = B = 0)");
      root.z0 = P.C / P.B;
      root.reason = "A = 0: P(z) is linear and has no double root";
      out.push_back(root);
      continue;
    }
    root.z0 = P.B / (2.0 * P.A);
    if (free == FreeParameter::a && !(aa > 1.0)) {
      root.reason = "a outside (1, +inf)";
    } else if (!(root.z0 > kBoundaryTol && root.z0 < 1.0 - kBoundaryTol)) {
      root.reason = "z0 outside (0, 1)";
    } else {
      root.admissible = true;
    }
    out.push_back(root);
  }
  return out;
}

WallPositions wall_positions(double a, double d1, double d2, double d3, double Delta) {
  if (!(a > 1.0)) throw std::domain_error("wall positions need a > 1");
  WallPositions w;
  w.t0 = t0_of({a, d1, d2, d3, Delta});
  w.t1 = w.t0 + d3 * std::log(a) / Delta;
  w.t2 = w.t0 + d3 * std::log(a - 1.0) / Delta;
  w.width = d3 * log_ratio(a) / Delta;
  return w;
}

double lambert_w(int branch, double x) {
  constexpr double inv_e = 0.36787944117144233;
  if (!std::isfinite(x)) throw std::domain_error("lambert_w: argument is not finite");
  if (branch == 0) {
    if (x < -inv_e) throw std::domain_error("lambert_w: branch 0 needs x >= -1/e");
    return boost::math::lambert_w0(x);
  }
  if (branch == -1) {
    if (x < -inv_e || x >= 0.0) throw std::domain_error("lambert_w: branch -1 needs -1/e <= x < 0");
    return boost::math::lambert_wm1(x);
  }
  throw std::invalid_argument("lambert_w: branch must be 0 or -1");
}

EdgeApproximation edge_approximation(const ModelParams& p, EdgeSide side, double t) {
  const RealParams r = real_params(p);
  const double tau = r.Delta * (t - t0_of(r));
  // u e^{c u} = E with u = z (left) or u = 1 - z (right)
  double c, logE;
  if (side == EdgeSide::left) {
    if (r.d1 == 0.0) throw std::domain_error("left edge approximation needs d1 != 0");
    c = -(r.a * r.d2 + r.d3) / (r.a * r.d1);
    logE = (tau - r.d3 * std::log(r.a)) / r.d1;
  } else {
    if (r.d2 == 0.0) throw std::domain_error("right edge approximation needs d2 != 0");
    c = (r.d3 / (r.a - 1.0) - r.d1) / r.d2;
    logE = (tau - r.d3 * std::log(r.a - 1.0)) / r.d2;
  }
  auto to_z = [&](double u) { return side == EdgeSide::left ? u : 1.0 - u; };
  if (c == 0.0) {
    const double u = std::exp(logE);
    if (!(u > 0.0 && u < 1.0)) throw std::domain_error("edge approximation leaves (0, 1)");
    return {to_z(u), 0};
  }
  const double log_x = logE + std::log(std::abs(c));
  if (log_x < -700.0) {
    // W(x) = x to working precision
    return {to_z(std::exp(logE)), 0};
  }
  if (log_x > 700.0 && c > 0.0) {
    // W + ln W = ln x, Newton from the asymptotic guess
    double W = log_x - std::log(log_x);
    for (int k = 0; k < 50; ++k) {
      const double step = (W + std::log(W) - log_x) / (1.0 + 1.0 / W);
      W -= step;
      if (std::abs(step) <= 1e-16 * W) break;
    }
    const double u = W / c;
    if (u > 0.0 && u < 1.0) return {to_z(u), 0};
    throw std::domain_error("edge approximation: no Lambert branch gives z in (0, 1)");
  }
  const double x = c * std::exp(logE);
  for (const int branch : {0, -1}) {
    if (branch == -1 && !(x < 0.0)) break;
    double W;
    try {
      W = lambert_w(branch, x);
    } catch (const std::domain_error&) {
      throw std::domain_error("edge approximation: Lambert argument " + std::to_string(x) + " below -1/e");
    }
    const double u = W / c;
    if (u > 0.0 && u < 1.0) return {to_z(u), branch};
  }
  throw std::domain_error("edge approximation: no Lambert branch gives z in (0, 1)");
}

double exponential_edge(const ModelParams& p, EdgeSide side, double t) {
  const RealParams r = real_params(p);
  const double tau = r.Delta * (t - t0_of(r));
  if (side == EdgeSide::left) {
    if (r.d1 == 0.0) throw std::domain_error("exponential edge needs d1 != 0");
    return std::exp((tau - r.d3 * std::log(r.a)) / r.d1);
  }
  if (r.d2 == 0.0) throw std::domain_error("exponential edge needs d2 != 0");
  return 1.0 - std::exp((tau - r.d3 * std::log(r.a - 1.0)) / r.d2);
}

double exponential_edge_divergence(const ModelParams& p, EdgeSide side) {
  const RealParams r = real_params(p);
  const auto w = wall_positions(r.a, r.d1, r.d2, r.d3, r.Delta);
  return side == EdgeSide::left ? w.t1 : w.t2;
}

double matched_pair(double a, double d3, double a_target) {
  if (a == a_target) {
    log_ratio(a);
    return d3;
  }
  return d3 * log_ratio(a) / log_ratio(a_target);
}

PeakMetrics peak_metrics(const std::vector<double>& t, const std::vector<double>& U) {
  if (t.empty()) throw std::invalid_argument("peak_metrics: empty trace");
  if (t.size() != U.size()) throw std::invalid_argument("peak_metrics: t and U differ in length");
  const std::size_t n = t.size();
  PeakMetrics m;
  std::vector<double> mag(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (!std::isfinite(U[k]) || !std::isfinite(t[k])) throw std::invalid_argument("peak_metrics: non-finite sample");
    mag[k] = std::abs(U[k]);
  }
  const std::size_t imax = static_cast<std::size_t>(std::max_element(mag.begin(), mag.end()) - mag.begin());
  m.max_abs = mag[imax];
  if (n == 1) {
    m.peaks.push_back({t[0], mag[0]});
    return m;
  }

  for (std::size_t k = 0; k < n; ++k) {
    const bool left_ok = k == 0 || mag[k] > mag[k - 1];
    const bool right_ok = k + 1 == n || mag[k] >= mag[k + 1];
    if (!left_ok || !right_ok) continue;
    // a plateau only counts once, at its first sample
    if (k == 0 && mag[0] == mag[1]) continue;
    Peak pk{t[k], mag[k]};
    if (k > 0 && k + 1 < n) {
      const double h1 = t[k] - t[k - 1], h2 = t[k + 1] - t[k];
      const double y0 = mag[k - 1], y1 = mag[k], y2 = mag[k + 1];
      // y1 + b x + c x^2 through the three samples, x measured from t[k]
      const double s1 = (y1 - y0) / h1, s2 = (y2 - y1) / h2;
      const double c = (s2 - s1) / (h1 + h2), b = s1 + c * h1;
      if (c < 0.0) {
        const double dx = std::clamp(-b / (2.0 * c), -h1, h2);
        pk.t = t[k] + dx;
        pk.height = y1 + b * dx + c * dx * dx;
      }
    }
    m.peaks.push_back(pk);
  }

  const double half = 0.5 * m.max_abs;
  std::size_t first = 0, last = n - 1;
  while (mag[first] < half) ++first;
  while (mag[last] < half) --last;
  auto cross = [&](std::size_t in, std::size_t out) {
    const double f = (mag[in] - half) / (mag[in] - mag[out]);
    return t[in] + f * (t[out] - t[in]);
  };
  const double tl = first > 0 ? cross(first, first - 1) : t[first];
  const double tr = last + 1 < n ? cross(last, last + 1) : t[last];
  m.fwhm = tr - tl;

  for (std::size_t k = 1; k < n; ++k) m.area += 0.5 * (U[k] + U[k - 1]) * (t[k] - t[k - 1]);
  return m;
}

nlohmann::json to_json(const PeakMetrics& m) {
  nlohmann::json peaks = nlohmann::json::array();
  for (const auto& p : m.peaks) peaks.push_back({{"t", p.t}, {"height", p.height}});
  return {{"peaks", peaks}, {"fwhm", m.fwhm}, {"area", m.area}, {"max_abs", m.max_abs}};
}

nlohmann::json to_json(const WallPositions& w) {
  return {{"t0", w.t0}, {"t1", w.t1}, {"t2", w.t2}, {"width", w.width}};
}

nlohmann::json to_json(const NarrowPulseRoot& r) {
  return {{"value", r.value},
          {"z0", r.z0},
          {"discriminant", r.discriminant},
          {"admissible", r.admissible},
          {"reason", r.reason}};
}

}  // namespace heunpulse
