#include "heunpulse/classes.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace heunpulse {

bool is_valid(const ClassId& id) {
  int sum = 0;
  for (int m : id.twice_k) {
    if (m < -2 || m > 2) return false;
    sum += m;
  }
  return sum <= -2;
}

std::vector<ClassId> enumerate_classes() {
  std::vector<ClassId> out;
  out.reserve(35);
  for (int m3 = 2; m3 >= -2; --m3)
    for (int m1 = -2; m1 <= 2; ++m1)
      for (int m2 = -2; m2 <= 2; ++m2) {
        const ClassId id{m1, m2, m3};
        if (is_valid(id)) out.push_back(id);
      }
  return out;
}

namespace {

std::string half_to_string(int twice) {
  if (twice % 2 == 0) return std::to_string(twice / 2);
  return std::to_string(twice) + "/2";
}

int parse_half(std::string_view tok) {
  while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
  while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
  if (tok.empty()) throw std::invalid_argument("empty class component");
  const std::string s(tok);
  if (const auto slash = s.find('/'); slash != std::string::npos) {
    int num = 0, den = 0;
    const auto* first = s.data();
    auto r1 = std::from_chars(first, first + slash, num);
    auto r2 = std::from_chars(first + slash + 1, first + s.size(), den);
    if (r1.ec != std::errc{} || r1.ptr != first + slash || r2.ec != std::errc{} ||
        r2.ptr != first + s.size() || (den != 1 && den != 2))
      throw std::invalid_argument("bad class component '" + s + "'");
    return den == 2 ? num : 2 * num;
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("bad class component '" + s + "'");
  }
  if (used != s.size() || std::abs(2 * v - std::round(2 * v)) > 1e-12)
    throw std::invalid_argument("class component '" + s + "' is not a half-integer");
  return static_cast<int>(std::lround(2 * v));
}

}  // namespace

std::string to_string(const ClassId& id) {
  return half_to_string(id.twice_k[0]) + "," + half_to_string(id.twice_k[1]) + "," +
         half_to_string(id.twice_k[2]);
}

ClassId parse_class(std::string_view text) {
  std::array<int, 3> m{};
  std::size_t start = 0;
  for (int i = 0; i < 3; ++i) {
    const std::size_t comma = text.find(',', start);
    if ((i < 2) != (comma != std::string_view::npos))
      throw std::invalid_argument("class must be 'k1,k2,k3', got '" + std::string(text) + "'");
    const auto tok = text.substr(start, i < 2 ? comma - start : std::string_view::npos);
    m[static_cast<std::size_t>(i)] = parse_half(tok);
    start = comma + 1;
  }
  const ClassId id{m[0], m[1], m[2]};
  if (!is_valid(id))
    throw std::invalid_argument("'" + std::string(text) + "' is not one of the 35 solvable classes");
  return id;
}

bool phi_exponents_trivial(const ClassId& id) {
  static constexpr std::array<ClassId, 4> trivial{ClassId{-1, -1, 0}, ClassId{-1, 0, -1},
                                                  ClassId{0, -1, -1}, ClassId{-1, -1, -1}};
  return std::find(trivial.begin(), trivial.end(), id) != trivial.end();
}

bool finite_area(const ClassId& id) { return id.twice_k[0] != -2 && id.twice_k[1] != -2; }

bool complex_line_admissible(const ClassId& id) { return id.twice_k[0] == id.twice_k[1]; }

std::string amplitude_formula(const ClassId& id) {
  static constexpr std::array<const char*, 3> whole{"z", "(z-1)", "(z-a)"};
  static constexpr std::array<const char*, 3> root{"sqrt(z)", "sqrt(z-1)", "sqrt(z-a)"};
  std::vector<std::string> num, den;
  for (std::size_t i = 0; i < 3; ++i) {
    const int m = id.twice_k[i];
    if (m == 0) continue;
    auto& side = m > 0 ? num : den;
    side.emplace_back(std::abs(m) == 1 ? root[i] : whole[i]);
  }
  std::string out;
  for (const auto& s : num) out += s;
  if (out.empty()) out = "1";
  if (den.empty()) return out;
  std::string d;
  for (const auto& s : den) d += s;
  return den.size() == 1 ? out + "/" + d : out + "/(" + d + ")";
}

void validate(const ModelParams& p) {
  if (std::abs(p.a) < 1e-14 || std::abs(p.a - 1.0) < 1e-14)
    throw std::invalid_argument("singular point a must differ from 0 and 1");
}

BasicModel::BasicModel(ClassId id, ModelParams params) : id_(id), p_(params) {
  if (!is_valid(id_)) throw std::invalid_argument("invalid class " + to_string(id_));
  validate(p_);
}

void BasicModel::check_regular(cplx z) const {
  for (const cplx s : singular_points())
    if (z == s) throw std::domain_error("basic model evaluated at a singular point");
}

cplx BasicModel::amplitude(cplx z) const {
  check_regular(z);
  return p_.U0star * half_pow(z, id_.twice_k[0]) * half_pow(z - 1.0, id_.twice_k[1]) *
         half_pow(z - p_.a, id_.twice_k[2]);
}

cplx BasicModel::amplitude_from_logs(const std::array<cplx, 3>& logs) const {
  cplx e{};
  for (int i = 0; i < 3; ++i) e += id_.k(i) * logs[static_cast<std::size_t>(i)];
  return p_.U0star * std::exp(e);
}

cplx BasicModel::detuning(cplx z) const {
  check_regular(z);
  return p_.d1 / z + p_.d2 / (z - 1.0) + p_.d3 / (z - p_.a);
}

cplx BasicModel::amplitude_log_derivative(cplx z) const {
  check_regular(z);
  return id_.k1() / z + id_.k2() / (z - 1.0) + id_.k3() / (z - p_.a);
}

Polynomial BasicModel::squared_amplitude_numerator() const {
  Polynomial out = Polynomial::constant(p_.U0star * p_.U0star);
  const auto pts = singular_points();
  for (int i = 0; i < 3; ++i)
    out = out * Polynomial::linear_factor(pts[static_cast<std::size_t>(i)]).pow(id_.shifted(i));
  return out;
}

}  // namespace heunpulse
