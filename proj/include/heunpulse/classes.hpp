#pragma once

#include <array>
#include <compare>
#include <string>
#include <string_view>
#include <vector>

#include "heunpulse/complex_math.hpp"
#include "heunpulse/polynomial.hpp"

namespace heunpulse {

/// One of the 35 solvable classes: the exponent triple (k1, k2, k3) of the
/// amplitude-modulation function, each a half-integer in [-1, 1].
///
/// Exponents are stored doubled (twice_k = 2k) so class identity is exact.
struct ClassId {
  std::array<int, 3> twice_k{};

  constexpr ClassId() = default;
  constexpr ClassId(int twice_k1, int twice_k2, int twice_k3) : twice_k{twice_k1, twice_k2, twice_k3} {}

  double k(int i) const { return 0.5 * twice_k[static_cast<std::size_t>(i)]; }
  double k1() const { return k(0); }
  double k2() const { return k(1); }
  double k3() const { return k(2); }

  /// m_i = 2 k_i + 2, the degree of each factor in U0*^2 z^m1 (z-1)^m2 (z-a)^m3.
  int shifted(int i) const { return twice_k[static_cast<std::size_t>(i)] + 2; }

  friend constexpr auto operator<=>(const ClassId&, const ClassId&) = default;
};

/// True iff each k_i is in {-1, -1/2, 0, 1/2, 1} and k1 + k2 + k3 <= -1.
bool is_valid(const ClassId& id);

/// The 35 classes ordered by descending k3, then ascending k1, then ascending k2.
std::vector<ClassId> enumerate_classes();

/// "k1,k2,k3" with halves written as fractions, e.g. "-1/2,0,-1".
std::string to_string(const ClassId& id);
/// Inverse of to_string; also accepts decimals such as "-0.5". Throws std::invalid_argument.
ClassId parse_class(std::string_view text);

/// Classes whose solution needs no pre-factor (all alpha_i = 0 admissible).
bool phi_exponents_trivial(const ClassId& id);
/// Constant-detuning pulses of the class vanish at both infinities.
bool finite_area(const ClassId& id);
/// k1 == k2: real amplitude under z = (1 + i y)/2.
bool complex_line_admissible(const ClassId& id);

/// Pretty-printed U*/U0* in the layout of the class tables, e.g. "sqrt(z-1)/(z(z-a))".
std::string amplitude_formula(const ClassId& id);

/// Free parameters of a basic model. All complex in general; Delta is the
/// constant detuning scale used by the constant-detuning transforms.
struct ModelParams {
  cplx a{2.0, 0.0};
  cplx U0star{1.0, 0.0};
  cplx d1{}, d2{}, d3{};
  double Delta = 1.0;
};

/// Throws std::invalid_argument if a coincides with 0 or 1.
void validate(const ModelParams& p);

/// The basic integrable model {U*(z), delta*_z(z)} of a class. Complex powers
/// use the principal branch.
class BasicModel {
 public:
  BasicModel(ClassId id, ModelParams params);

  const ClassId& class_id() const { return id_; }
  const ModelParams& params() const { return p_; }

  /// U*(z) = U0* z^k1 (z-1)^k2 (z-a)^k3. Throws std::domain_error at 0, 1, a.
  cplx amplitude(cplx z) const;
  /// delta*_z(z) = d1/z + d2/(z-1) + d3/(z-a).
  cplx detuning(cplx z) const;
  /// U*'(z) / U*(z) = k1/z + k2/(z-1) + k3/(z-a).
  cplx amplitude_log_derivative(cplx z) const;
  /// U*(z) using caller-supplied logs of z, z-1, z-a (for branch-continuous evaluation).
  cplx amplitude_from_logs(const std::array<cplx, 3>& logs) const;

  /// U0*^2 z^m1 (z-1)^m2 (z-a)^m3 with m_i = 2 k_i + 2: z^2 (z-1)^2 (z-a)^2 U*^2.
  Polynomial squared_amplitude_numerator() const;

  /// Singular points {0, 1, a}.
  std::array<cplx, 3> singular_points() const { return {cplx{0.0}, cplx{1.0}, p_.a}; }
  std::array<cplx, 3> detuning_residues() const { return {p_.d1, p_.d2, p_.d3}; }

 private:
  void check_regular(cplx z) const;

  ClassId id_;
  ModelParams p_;
};

}  // namespace heunpulse
