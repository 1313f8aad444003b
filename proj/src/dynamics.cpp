#include "heunpulse/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include <boost/math/interpolators/pchip.hpp>

#include "heunpulse/format.hpp"

namespace heunpulse {

FieldFunction field_function(const FieldConfiguration& f) {
  return [f](double t) {
    const FieldPoint pt = f.at(t);
    return FieldValue{pt.U, pt.delta_t, cplx{}};
  };
}

FieldFunction interpolated_field(const PulseTrace& trace) {
  if (trace.t.size() < 4) throw std::invalid_argument("interpolated_field: need at least four samples");
  for (std::size_t k = 1; k < trace.t.size(); ++k)
    if (!(trace.t[k] > trace.t[k - 1])) throw std::invalid_argument("interpolated_field: t must be strictly increasing");
  using boost::math::interpolators::pchip;
  auto U = std::make_shared<pchip<std::vector<double>>>(std::vector<double>(trace.t), std::vector<double>(trace.U));
  auto D = std::make_shared<pchip<std::vector<double>>>(std::vector<double>(trace.t),
                                                         std::vector<double>(trace.delta_t));
  const double lo = trace.t.front(), hi = trace.t.back();
  return [U, D, lo, hi](double t) {
    if (t < lo || t > hi) throw std::domain_error("interpolated_field: t = " + format_double(t) + " outside the trace");
    return FieldValue{(*U)(t), (*D)(t), U->prime(t)};
  };
}

namespace {

void check_rel_tol(double rel_tol) {
  if (!(rel_tol >= 1e-13 && rel_tol <= 1e-6)) throw std::invalid_argument("rel_tol must lie in [1e-13, 1e-6]");
}

}  // namespace

Trajectory integrate_two_state(const FieldFunction& field, double t0, std::span<const double> t_out,
                               AmplitudePair initial, double rel_tol, cplx delta0) {
  check_rel_tol(rel_tol);
  if (!field) throw std::invalid_argument("integrate_two_state: empty field");
  auto rhs = [&field](double t, const ComplexState<3>& y) {
    const FieldValue f = field(t);
    const cplx e = std::exp(I * y[2]);
    return ComplexState<3>{-I * f.U * y[1] / e, -I * f.U * e * y[0], f.delta_t};
  };
  Trajectory tr;
  tr.t.assign(t_out.begin(), t_out.end());
  const std::size_t n = t_out.size();
  tr.a1.resize(n);
  tr.a2.resize(n);
  tr.delta.resize(n);
  const double norm0 = std::norm(initial.a1) + std::norm(initial.a2);
  ComplexState<3> y{initial.a1, initial.a2, delta0};
  const OdeTolerance tol{rel_tol, 1e-2 * rel_tol * std::max(std::sqrt(norm0), 1e-300)};
  integrate_complex<3>(
      rhs, y, t0, t_out, tol,
      [&](std::size_t k, double, const ComplexState<3>& s) {
        tr.a1[k] = s[0];
        tr.a2[k] = s[1];
        tr.delta[k] = s[2];
        tr.norm_drift = std::max(tr.norm_drift, std::abs(std::norm(s[0]) + std::norm(s[1]) - norm0));
      },
      &tr.stats);
  return tr;
}

std::vector<std::pair<cplx, cplx>> integrate_second_order(const FieldFunction& field, double t0,
                                                          std::span<const double> t_out, cplx a2, cplx a2_t,
                                                          double rel_tol) {
  check_rel_tol(rel_tol);
  auto rhs = [&field](double t, const ComplexState<2>& y) {
    const FieldValue f = field(t);
    return ComplexState<2>{y[1], (I * f.delta_t + f.dU_dt / f.U) * y[1] - f.U * f.U * y[0]};
  };
  std::vector<std::pair<cplx, cplx>> out(t_out.size());
  ComplexState<2> y{a2, a2_t};
  const OdeTolerance tol{rel_tol, 1e-2 * rel_tol * std::max({std::abs(a2), 1e-300})};
  integrate_complex<2>(rhs, y, t0, t_out, tol,
                       [&](std::size_t k, double, const ComplexState<2>& s) { out[k] = {s[0], s[1]}; });
  return out;
}

namespace {

std::string format_cplx(cplx c) {
  if (c.imag() == 0.0) return format_double(c.real());
  return format_double(c.real()) + (c.imag() < 0.0 ? "" : "+") + format_double(c.imag()) + "i";
}

struct Basis {
  HeunValue u;
  std::string how;
};

struct TimeGrid {
  std::vector<double> t;
  double anchor = 0.0;
};

TimeGrid time_grid(const FieldConfiguration& field, const VerifyOptions& o) {
  if (o.n_points < 2) throw std::invalid_argument("verify_class: need at least two points");
  TimeGrid g;
  const std::size_t n = static_cast<std::size_t>(o.n_points);
  const double Delta = field.spec().Delta;
  switch (field.kind()) {
    case TransformKind::real_constant_detuning: {
      const auto [z_lo, z_hi] = o.z_interval;
      if (!(z_lo > 0.0 && z_hi < 1.0 && z_lo < z_hi)) throw std::invalid_argument("z_interval must lie inside (0, 1)");
      if (o.t_interval) {
        g.t = linspace(o.t_interval->first, o.t_interval->second, n);
      } else {
        const ConstantDetuningMap map(field.model());
        for (const double z : linspace(z_lo, z_hi, n)) g.t.push_back(map.t_of_z(z));
      }
      g.anchor = o.anchor_t.value_or(0.0);
      break;
    }
    case TransformKind::complex_line: {
      const auto iv = o.t_interval.value_or(std::pair{-4.0 / std::abs(Delta), 4.0 / std::abs(Delta)});
      g.t = linspace(iv.first, iv.second, n);
      g.anchor = o.anchor_t.value_or(0.0);
      break;
    }
    case TransformKind::periodic_exponential:
    case TransformKind::periodic_constant_amplitude: {
      const double half = std::numbers::pi / std::abs(Delta);
      const auto iv = o.t_interval.value_or(std::pair{-half, half});
      g.t = linspace(iv.first, iv.second, n);
      g.anchor = o.anchor_t.value_or(0.0);
      break;
    }
    case TransformKind::user_supplied: {
      if (!o.t_interval) throw std::invalid_argument("verify_class: user-supplied paths need a t_interval");
      g.t = linspace(o.t_interval->first, o.t_interval->second, n);
      g.anchor = o.anchor_t.value_or(0.5 * (o.t_interval->first + o.t_interval->second));
      break;
    }
  }
  std::sort(g.t.begin(), g.t.end());
  return g;
}

}  // namespace

VerificationReport verify_class(const FieldConfiguration& field, const VerifyOptions& o) {
  check_rel_tol(o.rel_tol);
  const ClassId& id = field.class_id();
  const ModelParams& p = field.model();
  const ExponentChoice choice = o.exponents.value_or(default_exponents(id, p));
  AnalyticSolution sol(id, p, choice);
  const HeunParams& hp = sol.hp();
  const BasicModel model(id, p);

  VerificationReport r;
  r.class_id = id;
  r.params = p;
  r.kind = field.kind();
  r.hp = hp;

  const TimeGrid grid = time_grid(field, o);
  const std::size_t n = grid.t.size();
  r.points = n;
  r.anchor_t = grid.anchor;
  r.t_begin = grid.t.front();
  r.t_end = grid.t.back();

  std::vector<double> right, left;
  std::vector<std::size_t> right_idx, left_idx;
  for (std::size_t k = 0; k < n; ++k) {
    if (grid.t[k] > grid.anchor) right.push_back(grid.t[k]), right_idx.push_back(k);
  }
  for (std::size_t k = n; k-- > 0;) {
    if (grid.t[k] < grid.anchor) left.push_back(grid.t[k]), left_idx.push_back(k);
  }

  // numeric reference
  const FieldFunction ff = field_function(field);
  const AmplitudePair init{cplx{std::sqrt(0.5)}, cplx{std::sqrt(0.5)}};
  std::vector<cplx> a2_num(n, init.a2);
  for (const auto& [times, idx] : {std::pair{&right, &right_idx}, std::pair{&left, &left_idx}}) {
    if (times->empty()) continue;
    const Trajectory tr = integrate_two_state(ff, grid.anchor, *times, init, o.rel_tol);
    r.norm_drift = std::max(r.norm_drift, tr.norm_drift);
    for (std::size_t j = 0; j < idx->size(); ++j) a2_num[(*idx)[j]] = tr.a2[j];
  }

  // analytic basis at the anchor
  const FieldPoint fa = field.at(grid.anchor);
  const cplx za = fa.z;
  r.anchor_z = za;
  HeunEvalOptions eval;
  eval.rel_tol = std::max(o.rel_tol, 1e-13);
  const cplx g = hp.gamma;
  const bool gamma_integer = std::abs(g.imag()) < 1e-9 && std::abs(g.real() - std::round(g.real())) < 1e-9;
  std::array<Basis, 2> basis;
  const std::array<cplx, 2> mus{cplx{0.0}, 1.0 - g};
  const std::array<HeunValue, 2> seeds{HeunValue{1.0, 0.0}, HeunValue{0.0, 1.0}};
  for (int k = 0; k < 2; ++k) {
    const bool use_seed = gamma_integer && ((k == 1 && std::round(g.real()) >= 1.0) ||
                                            (k == 0 && std::round(g.real()) < 1.0));
    if (!use_seed) {
      try {
        basis[k] = {heun_eval(hp, mus[k], za, eval), "series mu = " + format_cplx(mus[k])};
        continue;
      } catch (const ResonanceError&) {
        r.notes.push_back("Frobenius branch " + std::to_string(k) + " is resonant");
      }
    }
    basis[k] = {seeds[k], k == 0 ? "ode seed (u, u') = (1, 0)" : "ode seed (u, u') = (0, 1)"};
    r.notes.push_back("gamma_H = " + format_double(g.real()) +
                      " is an integer; basis solution " + std::to_string(k) +
                      " is the Heun equation integrated from the anchor");
  }
  r.branches = {basis[0].how, basis[1].how};

  SingularLogs logs = principal_logs(za, p.a);
  std::array<A2Value, 2> b0{sol.from_heun(za, basis[0].u, logs), sol.from_heun(za, basis[1].u, logs)};
  const cplx m00 = b0[0].value, m01 = b0[1].value;
  const cplx m10 = b0[0].dz * fa.dz_dt, m11 = b0[1].dz * fa.dz_dt;
  const cplx rhs0 = init.a2, rhs1 = -I * fa.U * init.a1;
  const cplx det = m00 * m11 - m01 * m10;
  const double norm_det = std::abs(det) / ((std::abs(m00) + std::abs(m10)) * (std::abs(m01) + std::abs(m11)));
  if (!(norm_det >= 1e-10))
    throw std::domain_error("verify_class: ill-conditioned anchor fit (normalized Wronskian " +
                            format_double(norm_det) + "); choose another anchor_t");
  r.cA = (rhs0 * m11 - m01 * rhs1) / det;
  r.cB = (m00 * rhs1 - rhs0 * m10) / det;
  sol.set_constants(r.cA, r.cB);

  // second-order equation in z, divided by phi
  const auto z_sing = model.singular_points();
  auto residual = [&](cplx z, const HeunValue& uA, const HeunValue& uB) {
    const cplx u = r.cA * uA.value + r.cB * uB.value;
    const cplx du = r.cA * uA.derivative + r.cB * uB.derivative;
    const cplx P = hp.gamma / z + hp.delta / (z - 1.0) + hp.epsilon / (z - hp.a);
    const cplx Q = (hp.alpha * hp.beta * z - hp.q) / (z * (z - 1.0) * (z - hp.a));
    const cplx d2u = -(P * du + Q * u);
    cplx L = 0.0, dL = 0.0;
    for (std::size_t j = 0; j < 3; ++j) {
      L += choice.alpha[j] / (z - z_sing[j]);
      dL -= choice.alpha[j] / ((z - z_sing[j]) * (z - z_sing[j]));
    }
    const cplx c1 = -I * model.detuning(z) - model.amplitude_log_derivative(z);
    const cplx U2 = model.amplitude(z) * model.amplitude(z);
    const cplx t1 = d2u + 2.0 * L * du + (dL + L * L) * u, t2 = c1 * (du + L * u), t3 = U2 * u;
    const double scale = std::abs(d2u) + std::abs(2.0 * L * du) + std::abs((dL + L * L) * u) + std::abs(t2) +
                         std::abs(t3);
    return scale > 0.0 ? std::abs(t1 + t2 + t3) / scale : 0.0;
  };

  std::vector<cplx> a2_an(n, init.a2);
  std::vector<cplx> z_at(n, za);
  double res_sum = 0.0;
  std::size_t res_count = 0;
  for (const auto& [times, idx] : {std::pair{&right, &right_idx}, std::pair{&left, &left_idx}}) {
    std::array<HeunValue, 2> u{basis[0].u, basis[1].u};
    std::array<TrackedLog, 3> tl{TrackedLog(za, logs[0]), TrackedLog(za - 1.0, logs[1]), TrackedLog(za - p.a, logs[2])};
    cplx z_prev = za;
    for (std::size_t j = 0; j < times->size(); ++j) {
      const cplx z = field.at((*times)[j]).z;
      for (auto& uk : u) uk = heun_propagate(hp, uk, z_prev, z, o.rel_tol);
      const SingularLogs lz{tl[0].update(z), tl[1].update(z - 1.0), tl[2].update(z - p.a)};
      const std::size_t k = (*idx)[j];
      a2_an[k] = r.cA * sol.from_heun(z, u[0], lz).value + r.cB * sol.from_heun(z, u[1], lz).value;
      z_at[k] = z;
      const double res = residual(z, u[0], u[1]);
      r.ode_residual_max = std::max(r.ode_residual_max, res);
      res_sum += res;
      ++res_count;
      z_prev = z;
    }
  }
  r.ode_residual_mean = res_count ? res_sum / static_cast<double>(res_count) : 0.0;

  double max_num = 0.0, max_diff = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (grid.t[k] == grid.anchor) z_at[k] = za;
    max_num = std::max(max_num, std::abs(a2_num[k]));
    max_diff = std::max(max_diff, std::abs(a2_an[k] - a2_num[k]));
  }
  r.max_relative_error = max_num > 0.0 ? max_diff / max_num : max_diff;
  r.z_begin = z_at.front();
  r.z_end = z_at.back();
  return r;
}

nlohmann::json to_json(const VerificationReport& r) {
  return {{"class", to_string(r.class_id)},
          {"transform", to_string(r.kind)},
          {"params",
           {{"a", to_json(r.params.a)},
            {"U0star", to_json(r.params.U0star)},
            {"d1", to_json(r.params.d1)},
            {"d2", to_json(r.params.d2)},
            {"d3", to_json(r.params.d3)},
            {"Delta", r.params.Delta}}},
          {"heun", to_json(r.hp)},
          {"cA", to_json(r.cA)},
          {"cB", to_json(r.cB)},
          {"branches", r.branches},
          {"max_relative_error", r.max_relative_error},
          {"norm_drift", r.norm_drift},
          {"ode_residual", {{"max", r.ode_residual_max}, {"mean", r.ode_residual_mean}}},
          {"compared_interval",
           {{"z", {to_json(r.z_begin), to_json(r.z_end)}}, {"t", {r.t_begin, r.t_end}}, {"points", r.points}}},
          {"anchor", {{"t", r.anchor_t}, {"z", to_json(r.anchor_z)}}},
          {"notes", r.notes}};
}

}  // namespace heunpulse
