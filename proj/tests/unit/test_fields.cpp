#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "heunpulse/fields.hpp"
#include "oracles.hpp"

using namespace heunpulse;

namespace {

std::mt19937 rng(2024);
double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

ModelParams smoke(const ClassId& id) {
  ModelParams p;
  p.a = 2.0;
  p.d1 = 1.0;
  p.d2 = -1.0;
  p.d3 = -2.0;
  p.U0star = realizing_u0star(id, 1.0);
  return p;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_CASE("constant-detuning map: t0 and z(0)") {
  ModelParams p = smoke(ClassId{0, 0, -2});
  ConstantDetuningMap m(p);
  CHECK(m.t0() == doctest::Approx(std::log(9.0 / 4.0)).epsilon(1e-15));
  CHECK(m.t_of_z(0.5) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(std::abs(m.z_of_t(0.0).z - 0.5) <= 1e-14);
}

TEST_CASE("constant-detuning map: round trip") {
  ConstantDetuningMap m(smoke(ClassId{0, 0, -2}));
  for (int k = 0; k < 100; ++k) {
    const double z = uniform(0.01, 0.99);
    const auto pt = m.z_of_t(m.t_of_z(z));
    CHECK(std::abs(pt.z - z) <= 1e-12);
    CHECK(std::abs(pt.w - (1.0 - z)) <= 1e-12);
    CHECK_FALSE(pt.clamped);
  }
  // far tails keep relative accuracy in z and in 1 - z
  const auto left = m.z_of_t(-40.0);
  CHECK(left.z > 0.0);
  CHECK(m.t_of_z(left.z) == doctest::Approx(-40.0).epsilon(1e-12));
  const auto right = m.z_of_t(15.0);
  CHECK(right.w > 0.0);
  CHECK(right.w < 1e-5);
}

TEST_CASE("constant-detuning map: non-monotone parameters are rejected") {
  ModelParams p = smoke(ClassId{0, 0, -2});
  p.d1 = 1.0;
  p.d2 = 1.0;
  p.d3 = 0.0;
  // P(z) = 2 z^2 - (1 + 2 a) z + a ... with a=2: roots 0.5 and 2
  CHECK_THROWS_AS(ConstantDetuningMap{p}, std::domain_error);
  p.a = cplx{2.0, 0.1};
  CHECK_THROWS_AS(ConstantDetuningMap{p}, std::invalid_argument);
  p = smoke(ClassId{0, 0, -2});
  p.a = 0.5;
  CHECK_THROWS_AS(ConstantDetuningMap{p}, std::invalid_argument);
}

TEST_CASE("constant-detuning sampling: chain rule and constant detuning") {
  const auto grid = linspace(-8.0, 8.0, 161);
  for (const auto& id : enumerate_classes()) {
    const ModelParams p = smoke(id);
    const auto tr = sample_constant_detuning(id, p, grid);
    const BasicModel model(id, p);
    const double a = 2.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double z = tr.z[k].real();
      CHECK(tr.z[k].imag() == 0.0);
      CHECK(std::abs(tr.delta_t[k] - 1.0) <= 1e-12);
      // independent: U*(z) * Delta z (z-1)(z-a) / P(z) with P written out from the residues
      const double P = 1.0 * (z - 1) * (z - a) - 1.0 * z * (z - a) - 2.0 * z * (z - 1);
      const cplx dz = z * (z - 1) * (z - a) / P;
      const cplx U = model.amplitude(cplx{z}) * dz;
      CHECK(std::abs(U.imag()) <= 1e-12 * std::max(1.0, std::abs(U)));
      CHECK(std::abs(tr.U[k] - U.real()) <= 1e-12 * std::max(1.0, std::abs(U)));
    }
    CHECK(tr.max_imag_ratio <= 1e-9);
  }
}

TEST_CASE("chain rule with finite-difference z'") {
  const ClassId id{-1, 0, -2};
  const auto f = FieldConfiguration::constant_detuning(id, smoke(id));
  const BasicModel model(id, f.model());
  const double h = 1e-4;
  for (double t : {-3.0, -1.0, 0.0, 0.7, 2.5}) {
    const cplx zp = f.at(t + h).z, zm = f.at(t - h).z;
    const cplx zpp = f.at(t + 2 * h).z, zmm = f.at(t - 2 * h).z;
    const cplx dz = (zmm - 8.0 * zm + 8.0 * zp - zpp) / (12.0 * h);
    const cplx U = model.amplitude(f.at(t).z) * dz;
    CHECK(std::abs(U - f.at(t).U) <= 1e-6 * std::abs(U));
  }
}

TEST_CASE("finite-area classification agrees with the sampled tails") {
  const auto grid = std::vector<double>{-60.0, 0.0, 60.0};
  int finite = 0;
  for (const auto& id : enumerate_classes()) {
    const auto tr = sample_constant_detuning(id, smoke(id), grid);
    const bool vanishes = std::abs(tr.U[0]) < 1e-6 * tr.normalization && std::abs(tr.U[2]) < 1e-6 * tr.normalization;
    CHECK_MESSAGE(vanishes == finite_area(id), to_string(id));
    finite += finite_area(id) ? 1 : 0;
  }
  CHECK(finite == 10);
}

TEST_CASE("box pulse parameters give a flat top") {
  ModelParams p;
  p.a = 2.0;
  p.d1 = 0.01;
  p.d2 = -0.01;
  p.d3 = -2.0;
  const ClassId id{0, 0, -2};
  p.U0star = realizing_u0star(id, 1.0);
  const auto grid = linspace(-0.3, 0.3, 61);
  const auto tr = sample_constant_detuning(id, p, grid);
  const double top = max_abs(tr.U);
  for (double u : tr.U) CHECK(std::abs(u) >= 0.95 * top);
}

TEST_CASE("generic sampler: z = t and constant z") {
  const ClassId id{0, 0, -2};
  ModelParams p;
  p.a = 2.0;
  p.U0star = 0.7;
  p.d1 = 0.3;
  p.d2 = -0.4;
  p.d3 = 1.1;
  const auto grid = linspace(0.1, 0.9, 17);
  const auto tr = sample_generic(id, p, [](double t) { return PathPoint{cplx{t}, cplx{1.0}}; }, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double t = grid[k];
    CHECK(tr.U[k] == doctest::Approx(0.7 / (t - 2.0)).epsilon(1e-14));
    CHECK(tr.delta_t[k] == doctest::Approx(0.3 / t - 0.4 / (t - 1.0) + 1.1 / (t - 2.0)).epsilon(1e-14));
  }
  const auto flat = sample_generic(id, p, [](double) { return PathPoint{cplx{0.3}, cplx{0.0}}; }, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    CHECK(flat.U[k] == 0.0);
    CHECK(flat.delta_t[k] == 0.0);
  }
  CHECK_THROWS_AS(sample_generic(id, p, [](double) { return PathPoint{cplx{2.0}, cplx{1.0}}; }, grid),
                  std::domain_error);
}

TEST_CASE("generic sampler: tanh path, detuning quadrature against the antiderivative") {
  const ClassId id{-1, -1, -2};
  ModelParams p;
  p.a = 3.0;
  p.U0star = realizing_u0star(id, 1.0);
  p.d1 = 0.4;
  p.d2 = -0.9;
  p.d3 = 0.25;
  auto path = [](double t) {
    const double th = std::tanh(t);
    return PathPoint{cplx{0.5 * (1.0 + th)}, cplx{0.5 * (1.0 - th * th)}};
  };
  const auto f = FieldConfiguration::generic(id, p, path);
  const double lo = -2.0, hi = 1.5;
  const double area = oracle::simpson([&](double t) { return f.at(t).delta_t.real(); }, lo, hi, 4000);
  auto antideriv = [&](double t) {
    const double z = path(t).z.real();
    return 0.4 * std::log(z) - 0.9 * std::log(1.0 - z) + 0.25 * std::log(3.0 - z);
  };
  CHECK(area == doctest::Approx(antideriv(hi) - antideriv(lo)).epsilon(1e-10));
  CHECK_NOTHROW(sample(f, linspace(lo, hi, 50)));
}

TEST_CASE("realness violations are reported") {
  const ClassId id{0, 0, -2};
  ModelParams p = smoke(id);
  p.U0star = cplx{0.0, 1.0};
  CHECK_THROWS_AS(sample_constant_detuning(id, p, linspace(-1, 1, 5)), std::domain_error);
}

TEST_CASE("complex line: map, monotonicity and realness") {
  ComplexLineSpec s;
  ComplexLineMap m(s);
  CHECK(m.y_of_t(0.0) == doctest::Approx(0.0).epsilon(1e-15));
  for (double y : {-1.9, -1.0, -0.3, 0.2, 1.0, 5.0, 1e3, 1e6}) {
    CHECK(m.y_of_t(m.t_of_y(y)) == doctest::Approx(y).epsilon(1e-11));
  }
  // y stays to the right of a0 < 0, and to the left of a0 > 0
  ComplexLineSpec pos = s;
  pos.a0 = 1.5;
  ComplexLineMap mp(pos);
  for (double t : {-30.0, -1.0, 0.0, 1.0, 30.0}) {
    CHECK(m.y_of_t(t) > s.a0);
    CHECK(mp.y_of_t(t) < pos.a0);
  }
  // dt/dy finite difference
  for (double y : {-1.5, 0.3, 4.0}) {
    const double h = 1e-5;
    const double fd = (m.t_of_y(y + h) - m.t_of_y(y - h)) / (2 * h);
    CHECK(1.0 / m.dy_dt(y) == doctest::Approx(fd).epsilon(1e-7));
  }
  ComplexLineSpec bad = s;
  bad.lambda1 = -3.0;
  CHECK_THROWS_AS(ComplexLineMap{bad}, std::domain_error);

  const auto grid = linspace(-20.0, 20.0, 201);
  for (const auto& id : enumerate_classes()) {
    if (!complex_line_admissible(id)) continue;
    const auto tr = sample_complex_line(id, s, grid);
    CHECK_MESSAGE(tr.max_imag_ratio <= 1e-9, to_string(id));
    for (double d : tr.delta_t) CHECK(d == 1.0);
  }
}

TEST_CASE("complex line: bindings and limits at large |t|") {
  ComplexLineSpec s;
  const ModelParams p = complex_line_model(ClassId{0, 0, -2}, s, 1.0);
  CHECK(std::abs(p.a - cplx{0.5, -1.0}) <= 1e-15);
  CHECK(std::abs(p.d1 - cplx{1.0, 0.0}) <= 1e-15);
  CHECK(std::abs(p.d3 - cplx{2.0, 0.0}) <= 1e-15);
  // (-2i)^(1 + 0 - 1) = 1
  CHECK(std::abs(p.U0star - 1.0) <= 1e-15);

  const std::vector<double> grid{-50.0, 50.0};
  const auto box = sample_complex_line(ClassId{0, 0, -2}, s, grid);
  CHECK(box.U[0] == doctest::Approx(s.U0 / s.lambda3).epsilon(0.01));
  CHECK(box.U[1] == doctest::Approx(s.U0 / (2 * s.lambda1 + s.lambda3)).epsilon(0.01));
  const auto bell = sample_complex_line(ClassId{-2, -2, -1}, s, linspace(-50.0, 50.0, 101));
  CHECK(std::abs(bell.U.front()) <= 0.01 * bell.normalization);
  CHECK(std::abs(bell.U.back()) <= 0.01 * bell.normalization);

  CHECK_THROWS_WITH_AS(complex_line_model(ClassId{0, -2, -2}, s, 1.0),
                       doctest::Contains("-1/2,-1/2,-1/2"), std::invalid_argument);
  int admissible = 0;
  for (const auto& id : enumerate_classes()) admissible += complex_line_admissible(id);
  CHECK(admissible == 9);
}

TEST_CASE("periodic exponential models") {
  PeriodicSpec s;
  const auto grid = linspace(-std::numbers::pi, std::numbers::pi, 401);
  const auto tr = sample_periodic(ClassId{0, -2, -2}, s, grid);
  double lo = 1e300, hi = 0.0;
  for (double u : tr.U) lo = std::min(lo, u), hi = std::max(hi, u);
  CHECK(lo == doctest::Approx(4.0 / 9.0).epsilon(1e-12));
  CHECK(hi == doctest::Approx(4.0).epsilon(1e-12));
  for (double d : tr.delta_t) CHECK(d == 1.0);

  const auto f = FieldConfiguration::periodic(ClassId{-1, -1, -1}, s, 1.3);
  for (double t : {-0.4, 0.1, 2.2}) {
    const double period = 2.0 * std::numbers::pi / 1.3;
    CHECK(std::abs(f.at(t + period).U - f.at(t).U) <= 1e-12);
    const double X = 1.0 + 0.25 - std::cos(1.3 * t);
    CHECK(f.at(t).U.real() == doctest::Approx(1.0 / std::sqrt(X)).epsilon(1e-13));
  }
  CHECK_NOTHROW(sample(f, linspace(-3, 3, 101)));

  PeriodicSpec small = s;
  small.a = 1e-10;
  const auto flat = sample_periodic(ClassId{0, -2, -2}, small, linspace(0, 6, 13));
  for (double u : flat.U) CHECK(u == doctest::Approx(1.0).epsilon(1e-4));

  CHECK_THROWS_AS(sample_periodic(ClassId{0, 0, -2}, s, grid), std::invalid_argument);
  small.a = 1.5;
  CHECK_THROWS_AS(sample_periodic(ClassId{0, -2, -2}, small, grid), std::invalid_argument);
}

TEST_CASE("constant-amplitude periodic model and crossing classification") {
  PeriodicSpec s;
  s.Delta1 = 0.5;
  s.Delta2 = -0.7;
  const auto grid = linspace(-std::numbers::pi, std::numbers::pi, 2001);
  const auto tr = sample_constant_amplitude(ClassId{-2, 0, 0}, s, grid);
  double lo = 1e300, hi = -1e300;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    CHECK(tr.U[k] == s.U0);
    lo = std::min(lo, tr.delta_t[k]);
    hi = std::max(hi, tr.delta_t[k]);
  }
  const auto e = constant_amplitude_extremes(s);
  CHECK(std::min(e.at_cos_plus, e.at_cos_minus) == doctest::Approx(lo).epsilon(1e-12));
  CHECK(std::max(e.at_cos_plus, e.at_cos_minus) == doctest::Approx(hi).epsilon(1e-12));
  CHECK(classify_crossing(s) == CrossingKind::crossing);

  // touching zero at cos = 1
  s.Delta1 = -(1.0 - s.a) * s.Delta2 / (1.0 + s.a - 2.0 * std::sqrt(s.a));
  CHECK(classify_crossing(s) == CrossingKind::glancing);
  const auto f = FieldConfiguration::constant_amplitude(ClassId{-2, 0, 0}, s);
  CHECK(std::abs(f.at(0.0).delta_t) <= 1e-14);

  const auto th = crossing_thresholds(s);
  s.Delta1 = std::max(th[0], th[1]) + 0.1;
  CHECK(classify_crossing(s) == CrossingKind::non_crossing);
  s.Delta1 = 0.5 * (th[0] + th[1]);
  CHECK(classify_crossing(s) == CrossingKind::crossing);

  CHECK_THROWS_AS(FieldConfiguration::constant_amplitude(ClassId{0, -2, -2}, s), std::invalid_argument);
}

TEST_CASE("transform kind names") {
  for (const auto k : {TransformKind::real_constant_detuning, TransformKind::complex_line,
                       TransformKind::periodic_exponential, TransformKind::periodic_constant_amplitude,
                       TransformKind::user_supplied})
    CHECK(parse_transform_kind(to_string(k)) == k);
  CHECK(parse_transform_kind("line") == TransformKind::complex_line);
  CHECK_THROWS_AS(parse_transform_kind("spiral"), std::invalid_argument);
}

TEST_CASE("CSV and JSON output") {
  const ClassId id{0, 0, -2};
  const auto tr = sample_constant_detuning(id, smoke(id), std::vector<double>{-1.0, 0.0, 1.0});
  std::ostringstream out;
  write_trace_csv(out, tr, true);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,Re_z,Im_z,U,delta_t");
  std::getline(in, line);
  CHECK(line.rfind("-1,", 0) == 0);
  std::getline(in, line);
  CHECK(line.rfind("0,", 0) == 0);
  CHECK(std::stod(line.substr(2)) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(std::count(line.begin(), line.end(), ',') == 4);
  int rows = 1;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 2);

  const auto meta = trace_metadata(tr, true);
  CHECK(meta["class"] == "0,0,-1");
  CHECK(meta["transform"]["kind"] == "real_constant_detuning");
  CHECK(meta["normalized"] == true);
  CHECK(meta["normalization"].get<double>() == doctest::Approx(tr.normalization));
  CHECK(meta["params"]["a"][0] == 2.0);
}
