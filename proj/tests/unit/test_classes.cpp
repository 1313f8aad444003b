#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "heunpulse/classes.hpp"

using namespace heunpulse;

TEST_CASE("census of solvable classes") {
  const auto classes = enumerate_classes();
  CHECK(classes.size() == 35);

  std::map<int, int> per_k3;
  for (const auto& c : classes) ++per_k3[c.twice_k[2]];
  CHECK(per_k3[-2] == 15);
  CHECK(per_k3[-1] == 10);
  CHECK(per_k3[0] == 6);
  CHECK(per_k3[1] == 3);
  CHECK(per_k3[2] == 1);

  CHECK(std::find(classes.begin(), classes.end(), ClassId{0, 0, 0}) == classes.end());

  CHECK(std::count_if(classes.begin(), classes.end(), finite_area) == 10);
  CHECK(std::count_if(classes.begin(), classes.end(), phi_exponents_trivial) == 4);
  CHECK(std::count_if(classes.begin(), classes.end(), complex_line_admissible) == 9);
}

TEST_CASE("enumeration matches brute force over shifted exponents") {
  std::set<std::array<int, 3>> brute;
  for (int m1 = 0; m1 <= 4; ++m1)
    for (int m2 = 0; m2 <= 4; ++m2)
      for (int m3 = 0; m3 <= 4; ++m3)
        if (m1 + m2 + m3 <= 4) brute.insert({m1 - 2, m2 - 2, m3 - 2});
  CHECK(brute.size() == 35);
  std::set<std::array<int, 3>> listed;
  for (const auto& c : enumerate_classes()) listed.insert(c.twice_k);
  CHECK(listed == brute);
}

TEST_CASE("enumeration order: k3 descending, then k1, k2 ascending") {
  const auto classes = enumerate_classes();
  for (std::size_t i = 1; i < classes.size(); ++i) {
    const auto& p = classes[i - 1].twice_k;
    const auto& c = classes[i].twice_k;
    const auto key_p = std::make_tuple(-p[2], p[0], p[1]);
    const auto key_c = std::make_tuple(-c[2], c[0], c[1]);
    CHECK(key_p < key_c);
  }
  CHECK(classes.front() == ClassId{-2, -2, 2});
}

TEST_CASE("text round trip and parse errors") {
  for (const auto& c : enumerate_classes()) CHECK(parse_class(to_string(c)) == c);
  CHECK(to_string(ClassId{-1, 0, -2}) == "-1/2,0,-1");
  CHECK(parse_class("-0.5, -0.5, -0.5") == ClassId{-1, -1, -1});
  CHECK_THROWS_AS(parse_class("0,0,0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_class("0,0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_class("0.3,0,-1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_class("x,0,-1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_class("3/4,0,-1"), std::invalid_argument);
}

TEST_CASE("phi-trivial membership") {
  CHECK(phi_exponents_trivial(ClassId{-1, -1, -1}));
  CHECK(phi_exponents_trivial(ClassId{-1, -1, 0}));
  CHECK_FALSE(phi_exponents_trivial(ClassId{0, 0, -2}));
  CHECK_FALSE(phi_exponents_trivial(ClassId{-2, -2, 2}));
}

TEST_CASE("basic model evaluators") {
  ModelParams p;
  p.a = 2.0;
  p.U0star = 1.0;
  const BasicModel m(ClassId{0, 0, -2}, p);
  CHECK(std::abs(m.amplitude(0.5) - cplx{-2.0 / 3.0}) < 1e-15);
  CHECK(m.detuning(0.3) == cplx{});
  CHECK_THROWS_AS(m.amplitude(0.0), std::domain_error);
  CHECK_THROWS_AS(m.amplitude(2.0), std::domain_error);
  CHECK_THROWS_AS(m.detuning(1.0), std::domain_error);

  p.U0star = -1.0;
  const BasicModel half(ClassId{-1, -1, -1}, p);
  const cplx u = half.amplitude(0.5);
  CHECK(std::abs(u * u - cplx{8.0 / 3.0}) < 1e-14);

  p.d1 = 1.0;
  p.d2 = -1.0;
  p.d3 = -2.0;
  const BasicModel d(ClassId{0, 0, -2}, p);
  const cplx z{0.3, 0.2};
  CHECK(std::abs(d.detuning(z) - (1.0 / z - 1.0 / (z - 1.0) - 2.0 / (z - 2.0))) < 1e-14);

  CHECK_THROWS_AS(BasicModel(ClassId{0, 0, 0}, p), std::invalid_argument);
  p.a = 1.0;
  CHECK_THROWS_AS(BasicModel(ClassId{0, 0, -2}, p), std::invalid_argument);
}

TEST_CASE("squared amplitude numerator is a polynomial of degree at most four") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (const auto& id : enumerate_classes()) {
    ModelParams p;
    p.a = cplx{u(rng) + 3.0, u(rng)};
    p.U0star = cplx{u(rng), u(rng)};
    const BasicModel m(id, p);
    const Polynomial num = m.squared_amplitude_numerator();
    CHECK(num.degree() <= 4);
    CHECK(num.degree() == id.shifted(0) + id.shifted(1) + id.shifted(2));
    for (int k = 0; k < 5; ++k) {
      const cplx z{u(rng), u(rng)};
      const cplx direct = z * z * (z - 1.0) * (z - 1.0) * (z - p.a) * (z - p.a) * m.amplitude(z) * m.amplitude(z);
      CHECK(std::abs(num(z) - direct) <= 1e-12 * std::max(1.0, std::abs(direct)));
    }
  }
}

TEST_CASE("amplitude table for k3 = -1") {
  const std::map<std::array<int, 3>, std::string> table{
      {{-2, 2, -2}, "(z-1)/(z(z-a))"},
      {{-2, 1, -2}, "sqrt(z-1)/(z(z-a))"},
      {{-1, 1, -2}, "sqrt(z-1)/(sqrt(z)(z-a))"},
      {{-2, 0, -2}, "1/(z(z-a))"},
      {{-1, 0, -2}, "1/(sqrt(z)(z-a))"},
      {{0, 0, -2}, "1/(z-a)"},
      {{-2, -1, -2}, "1/(zsqrt(z-1)(z-a))"},
      {{-1, -1, -2}, "1/(sqrt(z)sqrt(z-1)(z-a))"},
      {{0, -1, -2}, "1/(sqrt(z-1)(z-a))"},
      {{1, -1, -2}, "sqrt(z)/(sqrt(z-1)(z-a))"},
      {{-2, -2, -2}, "1/(z(z-1)(z-a))"},
      {{-1, -2, -2}, "1/(sqrt(z)(z-1)(z-a))"},
      {{0, -2, -2}, "1/((z-1)(z-a))"},
      {{1, -2, -2}, "sqrt(z)/((z-1)(z-a))"},
      {{2, -2, -2}, "z/((z-1)(z-a))"},
  };
  int seen = 0;
  for (const auto& id : enumerate_classes()) {
    if (id.twice_k[2] != -2) continue;
    ++seen;
    const auto it = table.find(id.twice_k);
    REQUIRE(it != table.end());
    CHECK(amplitude_formula(id) == it->second);
  }
  CHECK(seen == 15);
}
