#include "heunpulse/mapping.hpp"

#include <stdexcept>

namespace heunpulse {

namespace {

std::array<cplx, 3> residues(const ModelParams& p) { return {p.d1, p.d2, p.d3}; }
std::array<cplx, 3> points(const ModelParams& p) { return {cplx{0.0}, cplx{1.0}, p.a}; }

// Derivative at z_j of U0*^2 prod_l (z - z_l)^{n_l} where n_j = m_j is the shifted
// exponent at z_j and n_l = 2 k_l elsewhere.
cplx laurent_slope(const ClassId& id, const ModelParams& p, int j) {
  const auto z = points(p);
  const int mj = id.shifted(j);
  if (mj >= 2) return 0.0;
  cplx g = p.U0star * p.U0star;
  cplx log_slope{};
  for (int l = 0; l < 3; ++l) {
    if (l == j) continue;
    const int n = id.twice_k[static_cast<std::size_t>(l)];
    const cplx w = z[static_cast<std::size_t>(j)] - z[static_cast<std::size_t>(l)];
    g *= ipow(w, n);
    log_slope += static_cast<double>(n) / w;
  }
  return mj == 1 ? g : g * log_slope;
}

Polynomial partial_product(const std::array<cplx, 3>& coef, const std::array<cplx, 3>& z) {
  Polynomial out;
  for (std::size_t j = 0; j < 3; ++j) {
    Polynomial term = Polynomial::constant(coef[j]);
    for (std::size_t l = 0; l < 3; ++l)
      if (l != j) term = term * Polynomial::linear_factor(z[l]);
    out += term;
  }
  return out;
}

}  // namespace

ExponentCandidates exponent_candidates(const ClassId& id, const ModelParams& p) {
  validate(p);
  ExponentCandidates out;
  const cplx u2 = p.U0star * p.U0star;
  const auto d = residues(p);
  const auto z = points(p);
  for (int j = 0; j < 3; ++j) {
    const auto sj = static_cast<std::size_t>(j);
    cplx L{};
    if (id.shifted(j) == 0) {
      L = u2;
      for (int l = 0; l < 3; ++l)
        if (l != j) L *= ipow(z[sj] - z[static_cast<std::size_t>(l)], id.twice_k[static_cast<std::size_t>(l)]);
    }
    out.L[sj] = L;
    const cplx b = 1.0 + id.k(j) + I * d[sj];
    if (L == cplx{}) {
      out.roots[sj] = {cplx{0.0}, b};
    } else {
      const cplx s = std::sqrt(b * b - 4.0 * L);
      out.roots[sj] = {0.5 * (b + s), 0.5 * (b - s)};
    }
  }
  return out;
}

ExponentChoice choose_exponents(const ClassId& id, const ModelParams& p, std::array<int, 3> branch) {
  const auto cand = exponent_candidates(id, p);
  ExponentChoice out;
  for (std::size_t j = 0; j < 3; ++j) {
    if (branch[j] != 0 && branch[j] != 1) throw std::invalid_argument("exponent branch must be 0 or 1");
    out.branch[j] = branch[j];
    out.alpha[j] = cand.roots[j][static_cast<std::size_t>(branch[j])];
  }
  return out;
}

ExponentChoice default_exponents(const ClassId& id, const ModelParams& p) {
  const auto cand = exponent_candidates(id, p);
  std::array<int, 3> branch{};
  for (std::size_t j = 0; j < 3; ++j) {
    const auto& r = cand.roots[j];
    if (r[0] == cplx{}) branch[j] = 0;
    else if (r[1] == cplx{}) branch[j] = 1;
    else branch[j] = std::abs(r[1].real()) < std::abs(r[0].real()) ? 1 : 0;
  }
  return choose_exponents(id, p, branch);
}

double exponent_residual(const ClassId& id, const ModelParams& p, const ExponentChoice& choice) {
  const auto cand = exponent_candidates(id, p);
  const auto d = residues(p);
  double worst = 0.0;
  for (std::size_t j = 0; j < 3; ++j) {
    const cplx al = choice.alpha[j];
    const cplx r = al * (1.0 + id.k(static_cast<int>(j)) + I * d[j] - al) - cand.L[j];
    worst = std::max(worst, std::abs(r) / std::max(1.0, std::abs(cand.L[j])));
  }
  return worst;
}

MappedParams heun_params(const ClassId& id, const ModelParams& p, const ExponentChoice& choice) {
  const double eres = exponent_residual(id, p, choice);
  if (!(eres <= 1e-10))
    throw std::invalid_argument("exponent choice does not solve its quadratic (residual " + std::to_string(eres) + ")");

  MappedParams m;
  m.class_id = id;
  m.params = p;
  m.exponents = choice;
  const auto d = residues(p);
  const auto z = points(p);
  const auto& al = choice.alpha;

  HeunParams& hp = m.hp;
  hp.a = p.a;
  hp.gamma = 2.0 * al[0] - I * d[0] - id.k1();
  hp.delta = 2.0 * al[1] - I * d[1] - id.k2();
  hp.epsilon = 2.0 * al[2] - I * d[2] - id.k3();

  // N = A'D - AD' + A^2 + GA + U0*^2 prod (z - z_j)^{m_j} must equal (alpha beta z - q) D.
  const Polynomial D = Polynomial::linear_factor(0.0) * Polynomial::linear_factor(1.0) * Polynomial::linear_factor(p.a);
  std::array<cplx, 3> g{};
  for (std::size_t j = 0; j < 3; ++j) g[j] = -I * d[j] - id.k(static_cast<int>(j));
  const Polynomial A = partial_product(al, z);
  const Polynomial G = partial_product(g, z);
  const BasicModel model(id, p);
  const Polynomial N = A.derivative() * D - A * D.derivative() + A * A + G * A + model.squared_amplitude_numerator();
  const auto [quot, rem] = N.divmod(D);
  const cplx alpha_beta = quot.coeff(1);
  hp.q = -quot.coeff(0);
  double nscale = 1.0;
  for (const cplx c : N.coeffs()) nscale = std::max(nscale, std::abs(c));
  double rscale = 0.0;
  for (const cplx c : rem.coeffs()) rscale = std::max(rscale, std::abs(c));
  m.matching_remainder = rscale / nscale;

  const cplx s = hp.gamma + hp.delta + hp.epsilon - 1.0;
  const cplx disc = std::sqrt(s * s - 4.0 * alpha_beta);
  hp.alpha = 0.5 * (s + disc);
  hp.beta = 0.5 * (s - disc);

  // closed-form route through the Laurent data at 0 and 1
  const cplx h0 = laurent_slope(id, p, 0);
  const cplx h1 = laurent_slope(id, p, 1);
  const cplx a = p.a;
  m.q_printed = (hp.gamma - 2.0 * al[0]) * (al[2] + a * al[1]) + (a * hp.delta + hp.epsilon) * al[0] - a * h0;
  m.alpha_beta_printed = m.q_printed + hp.epsilon * al[1] + al[2] * (hp.delta - 2.0 * al[1]) -
                         (1.0 - a) * (2.0 * al[0] * al[1] - hp.delta * al[0] - hp.gamma * al[1]) + (1.0 - a) * h1;
  const double scale = std::max({1.0, std::abs(hp.q), std::abs(alpha_beta)});
  m.printed_discrepancy =
      std::max(std::abs(hp.q - m.q_printed), std::abs(alpha_beta - m.alpha_beta_printed)) / scale;
  m.discrepancy_flag = m.printed_discrepancy > 1e-6;
  return m;
}

namespace {

struct LocalTerms {
  cplx psi, dpsi, f, u2, rhs;
};

LocalTerms local_terms(const MappedParams& m, cplx z) {
  const auto d = residues(m.params);
  const auto pts = points(m.params);
  LocalTerms t{};
  t.u2 = m.params.U0star * m.params.U0star;
  for (std::size_t j = 0; j < 3; ++j) {
    const cplx w = z - pts[j];
    if (w == cplx{}) throw std::domain_error("identity evaluated at a singular point");
    const cplx al = m.exponents.alpha[j];
    t.psi += al / w;
    t.dpsi -= al / (w * w);
    t.f += (-I * d[j] - m.class_id.k(static_cast<int>(j))) / w;
    t.u2 *= ipow(w, m.class_id.twice_k[j]);
  }
  const auto& hp = m.hp;
  t.rhs = (hp.alpha * hp.beta * z - hp.q) / (z * (z - 1.0) * (z - hp.a));
  return t;
}

}  // namespace

cplx first_derivative_coefficient_residual(const MappedParams& m, cplx z) {
  const auto t = local_terms(m, z);
  const auto& hp = m.hp;
  return 2.0 * t.psi + t.f - (hp.gamma / z + hp.delta / (z - 1.0) + hp.epsilon / (z - hp.a));
}

cplx coefficient_identity_residual(const MappedParams& m, cplx z) {
  const auto t = local_terms(m, z);
  return t.dpsi + t.psi * t.psi + t.f * t.psi + t.u2 - t.rhs;
}

double coefficient_identity_scale(const MappedParams& m, cplx z) {
  const auto t = local_terms(m, z);
  return std::max({std::abs(t.dpsi), std::norm(t.psi), std::abs(t.f * t.psi), std::abs(t.u2), std::abs(t.rhs),
                   1e-300});
}

SingularLogs principal_logs(cplx z, cplx a) { return {std::log(z), std::log(z - 1.0), std::log(z - a)}; }

AnalyticSolution::AnalyticSolution(const ClassId& id, const ModelParams& p, const ExponentChoice& choice)
    : AnalyticSolution(heun_params(id, p, choice)) {}

AnalyticSolution::AnalyticSolution(const MappedParams& m) : m_(m), model_(m.class_id, m.params) {}

cplx AnalyticSolution::phi(const SingularLogs& logs) const {
  cplx e{};
  for (std::size_t j = 0; j < 3; ++j) e += m_.exponents.alpha[j] * logs[j];
  return std::exp(e);
}

cplx AnalyticSolution::phi_log_derivative(cplx z) const {
  const auto& al = m_.exponents.alpha;
  return al[0] / z + al[1] / (z - 1.0) + al[2] / (z - m_.params.a);
}

A2Value AnalyticSolution::from_heun(cplx z, const HeunValue& u, const SingularLogs& logs) const {
  const cplx ph = phi(logs);
  return {ph * u.value, ph * (phi_log_derivative(z) * u.value + u.derivative)};
}

A2Value AnalyticSolution::branch(int which, cplx z, const HeunEvalOptions& opts) const {
  if (which != 0 && which != 1) throw std::invalid_argument("branch index must be 0 or 1");
  const cplx mu = frobenius_exponents()[static_cast<std::size_t>(which)];
  return from_heun(z, heun_eval(m_.hp, mu, z, opts), principal_logs(z, m_.params.a));
}

A2Value AnalyticSolution::a2(cplx z, const HeunEvalOptions& opts) const {
  A2Value out{};
  if (cA_ != cplx{}) {
    const auto b = branch(0, z, opts);
    out.value += cA_ * b.value;
    out.dz += cA_ * b.dz;
  }
  if (cB_ != cplx{}) {
    const auto b = branch(1, z, opts);
    out.value += cB_ * b.value;
    out.dz += cB_ * b.dz;
  }
  return out;
}

cplx AnalyticSolution::a1_from(cplx da2_dz, const SingularLogs& logs) const {
  const cplx ustar = model_.amplitude_from_logs(logs);
  if (std::abs(ustar) == 0.0 || !std::isfinite(std::abs(ustar)))
    throw std::domain_error("a1 undefined where U* vanishes");
  const auto d = residues(m_.params);
  const cplx delta = d[0] * logs[0] + d[1] * logs[1] + d[2] * logs[2];
  return I * da2_dz * std::exp(-I * delta) / ustar;
}

cplx AnalyticSolution::a1(cplx z, const HeunEvalOptions& opts) const {
  return a1_from(a2(z, opts).dz, principal_logs(z, m_.params.a));
}

nlohmann::json to_json(cplx c) { return nlohmann::json::array({c.real(), c.imag()}); }

nlohmann::json to_json(const HeunParams& hp) {
  return {{"a", to_json(hp.a)},         {"q", to_json(hp.q)},
          {"alpha", to_json(hp.alpha)}, {"beta", to_json(hp.beta)},
          {"gamma", to_json(hp.gamma)}, {"delta", to_json(hp.delta)},
          {"epsilon", to_json(hp.epsilon)}, {"fuchsian_residual", std::abs(hp.fuchsian_residual())}};
}

nlohmann::json to_json(const MappedParams& m) {
  nlohmann::json exps = nlohmann::json::array();
  for (const cplx a : m.exponents.alpha) exps.push_back(to_json(a));
  return {{"class", to_string(m.class_id)},
          {"class_doubled", m.class_id.twice_k},
          {"params",
           {{"a", to_json(m.params.a)},
            {"U0star", to_json(m.params.U0star)},
            {"d1", to_json(m.params.d1)},
            {"d2", to_json(m.params.d2)},
            {"d3", to_json(m.params.d3)},
            {"Delta", m.params.Delta}}},
          {"exponents", exps},
          {"exponent_branches", m.exponents.branch},
          {"mu", nlohmann::json::array({to_json(0.0), to_json(1.0 - m.hp.gamma)})},
          {"heun", to_json(m.hp)},
          {"q_printed", to_json(m.q_printed)},
          {"alpha_beta_printed", to_json(m.alpha_beta_printed)},
          {"printed_discrepancy", m.printed_discrepancy},
          {"discrepancy_flag", m.discrepancy_flag},
          {"matching_remainder", m.matching_remainder}};
}

}  // namespace heunpulse
