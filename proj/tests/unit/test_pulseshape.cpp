#include <doctest.h>

#include <random>

#include "heunpulse/pulseshape.hpp"
#include "oracles.hpp"

using namespace heunpulse;

namespace {

std::mt19937 rng(17);
double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

ModelParams real_model(double a, double d1, double d2, double d3, cplx U0star = 1.0) {
  ModelParams p;
  p.a = a;
  p.d1 = d1;
  p.d2 = d2;
  p.d3 = d3;
  p.U0star = U0star;
  return p;
}

}  // namespace

TEST_CASE("crossing polynomial coefficients match the partial-fraction form") {
  for (int k = 0; k < 200; ++k) {
    const double a = uniform(1.01, 5.0), d1 = uniform(-3, 3), d2 = uniform(-3, 3), d3 = uniform(-10, 10);
    const auto P = CrossingPolynomial::from(a, d1, d2, d3);
    for (double z : {-1.3, 0.0, 0.37, 1.0, 2.2}) {
      const double direct = d1 * (z - 1) * (z - a) + d2 * z * (z - a) + d3 * z * (z - 1);
      CHECK(std::abs(P(z) - direct) <= 1e-14 * (1.0 + std::abs(direct)) * 10.0);
    }
  }
}

TEST_CASE("narrow pulse with free d3") {
  const auto roots = narrow_pulse_roots(FreeParameter::d3, 2.0, 0.5, -2.0, 0.0);
  REQUIRE(roots.size() == 2);
  int admissible = 0;
  for (const auto& r : roots) {
    CHECK(r.discriminant <= 1e-12);
    const auto P = CrossingPolynomial::from(2.0, 0.5, -2.0, r.value);
    CHECK(std::abs(P(r.z0)) <= 1e-12);
    CHECK(std::abs(P.derivative(r.z0)) <= 1e-12);
    if (r.admissible) {
      ++admissible;
      CHECK(r.value == doctest::Approx(4.5 + 2.0 * std::sqrt(2.0)).epsilon(1e-14));
      CHECK(r.z0 == doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-14));
    } else {
      CHECK(r.value == doctest::Approx(4.5 - 2.0 * std::sqrt(2.0)).epsilon(1e-14));
      CHECK_FALSE(r.reason.empty());
    }
  }
  CHECK(admissible == 1);

  // d2 = -d1: both roots re-verified by direct evaluation of the discriminant
  for (const auto& r : narrow_pulse_roots(FreeParameter::d3, 2.0, 0.5, -0.5, 0.0)) {
    CHECK(std::abs(crossing_discriminant(2.0, 0.5, -0.5, r.value)) <= 1e-12);
    CHECK((r.value == doctest::Approx(1.5 + std::sqrt(2.0)) || r.value == doctest::Approx(1.5 - std::sqrt(2.0))));
  }

  // d1 = 0 puts the double root on z = 0
  for (const auto& r : narrow_pulse_roots(FreeParameter::d3, 2.0, 0.0, 1.0, 0.0)) {
    CHECK(r.value == doctest::Approx(-2.0));
    CHECK_FALSE(r.admissible);
  }
}

TEST_CASE("narrow pulse with free a") {
  for (int k = 0; k < 50; ++k) {
    const double d1 = uniform(0.1, 2), d2 = uniform(-3, -0.2), d3 = uniform(-5, 10);
    for (const auto& r : narrow_pulse_roots(FreeParameter::a, 0.0, d1, d2, d3)) {
      CHECK(std::abs(crossing_discriminant(r.value, d1, d2, d3)) <= 1e-10 * (1.0 + r.value * r.value));
      if (r.admissible) {
        CHECK(r.value > 1.0);
        CHECK(r.z0 > 0.0);
        CHECK(r.z0 < 1.0);
      }
    }
  }
  // the d3 root above seen from the a side
  const double d3 = 4.5 + 2.0 * std::sqrt(2.0);
  bool found = false;
  for (const auto& r : narrow_pulse_roots(FreeParameter::a, 0.0, 0.5, -2.0, d3))
    if (std::abs(r.value - 2.0) < 1e-9) found = r.admissible;
  CHECK(found);
  CHECK_THROWS_AS(narrow_pulse_roots(FreeParameter::a, 0.0, 0.0, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("wall positions") {
  const auto w = wall_positions(2.0, 0.0, 0.0, -2.0);
  CHECK(w.width == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-14));
  CHECK(w.t0 == doctest::Approx(std::log(9.0 / 4.0)).epsilon(1e-14));
  CHECK(w.t1 == doctest::Approx(std::log(9.0 / 4.0) - 2.0 * std::log(2.0)).epsilon(1e-14));
  CHECK(w.t2 == doctest::Approx(std::log(9.0 / 4.0)).epsilon(1e-14));
  CHECK(w.t2 - w.t1 == doctest::Approx(w.width).epsilon(1e-13));
  CHECK(wall_positions(2.0, 0.0, 0.0, 0.0).width == 0.0);

  // width grows without bound as a -> 1 and decreases monotonically in a
  double prev = 1e300;
  for (double a : {1.000001, 1.001, 1.1, 1.5, 2.0, 5.0, 50.0}) {
    const double d = wall_positions(a, 1.0, -1.0, -3.0).width;
    CHECK(d < prev);
    prev = d;
  }
  CHECK(wall_positions(1.0 + 1e-12, 1.0, -1.0, -3.0).width > 80.0);
}

TEST_CASE("Lambert W") {
  CHECK(lambert_w(0, 0.0) == 0.0);
  CHECK(lambert_w(0, std::exp(1.0)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(lambert_w(0, 1.0) == doctest::Approx(oracle::lambert_w0_fixed_point(1.0)).epsilon(1e-14));
  CHECK(lambert_w(0, 1.0) == doctest::Approx(0.5671432904097838).epsilon(1e-15));
  const double inv_e = std::exp(-1.0);
  for (int k = 0; k <= 400; ++k) {
    const double x = -inv_e + (k + 0.5) * (20.0 + inv_e) / 401.0;
    const double w = lambert_w(0, x);
    CHECK(std::abs(w * std::exp(w) - x) <= 1e-13 * std::max(std::abs(x), 1e-300) + 1e-300);
    if (x < 0.0) {
      const double wm = lambert_w(-1, x);
      CHECK(wm <= -1.0);
      CHECK(std::abs(wm * std::exp(wm) - x) <= 1e-13 * std::abs(x));
    }
  }
  CHECK(lambert_w(-1, -inv_e) == doctest::Approx(-1.0).epsilon(1e-7));
  CHECK_THROWS_AS(lambert_w(0, -0.5), std::domain_error);
  CHECK_THROWS_AS(lambert_w(-1, 0.1), std::domain_error);
  CHECK_THROWS_AS(lambert_w(1, 0.1), std::invalid_argument);
}

TEST_CASE("left edge approximation follows the rising edge") {
  const ClassId id{-1, -1, -1};
  const ModelParams p = real_model(2.5, 0.01, -0.03, -3.0, -1.0);
  const auto tr = sample_constant_detuning(id, p, linspace(-2.0, 2.0, 8001));
  const double t_peak = peak_metrics(tr).peaks.front().t;
  ConstantDetuningMap map(p);
  double worst = 0.0;
  for (double t = -2.0; t <= t_peak; t += 1e-3)
    worst = std::max(worst, std::abs(edge_approximation(p, EdgeSide::left, t).z - map.z_of_t(t).z));
  CHECK(worst <= 0.02);

  // the error vanishes as z -> 0 faster than z itself
  const ModelParams q = real_model(2.0, 0.4, -0.7, -2.0);
  ConstantDetuningMap mq(q);
  double prev_ratio = 1e300;
  for (double z : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5}) {
    const double t = mq.t_of_z(z);
    const double err = std::abs(edge_approximation(q, EdgeSide::left, t).z - z);
    CHECK(err / z < prev_ratio);
    prev_ratio = err / z;
  }
  CHECK(prev_ratio < 1e-8);
}

TEST_CASE("right edge approximation and its wall") {
  const ModelParams q = real_model(2.0, 0.4, -0.7, -2.0);
  ConstantDetuningMap mq(q);
  double prev_ratio = 1e300;
  for (double w : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const double t = mq.t_of_z(1.0 - w);
    const double err = std::abs(edge_approximation(q, EdgeSide::right, t).z - (1.0 - w));
    CHECK(err / w < prev_ratio);
    prev_ratio = err / w;
  }
  CHECK(prev_ratio < 1e-6);

  // d2 -> 0: the right edge approaches a step located at t2
  const ModelParams s = real_model(2.0, 0.1, -1e-5, -2.0);
  const double t2 = wall_positions(2.0, 0.1, -1e-5, -2.0).t2;
  CHECK(exponential_edge_divergence(s, EdgeSide::right) == t2);
  CHECK(1.0 - edge_approximation(s, EdgeSide::right, t2 + 0.02).z < 1e-6);
  CHECK(1.0 - edge_approximation(s, EdgeSide::right, t2 - 0.02).z > 5e-3);
}

TEST_CASE("exponential edge") {
  const ModelParams p = real_model(2.0, 0.1, -0.02, -2.0, -1.0);
  const double t1 = exponential_edge_divergence(p, EdgeSide::left);
  CHECK(t1 == doctest::Approx(wall_positions(2.0, 0.1, -0.02, -2.0).t1));
  CHECK(exponential_edge(p, EdgeSide::left, t1) == doctest::Approx(1.0).epsilon(1e-14));
  // a d2 + d3 = 0 collapses the Lambert form onto the exponential
  const ModelParams e = real_model(2.0, 0.3, 1.0, -2.0);
  for (double t : {-6.0, -4.0, -3.0}) {
    const double ze = exponential_edge(e, EdgeSide::left, t);
    if (ze < 1.0) CHECK(edge_approximation(e, EdgeSide::left, t).z == doctest::Approx(ze).epsilon(1e-14));
  }
  ModelParams tiny = real_model(2.0, 0.3, 1.0 + 1e-9, -2.0);
  const double t = -4.0;
  CHECK(edge_approximation(tiny, EdgeSide::left, t).z == doctest::Approx(exponential_edge(e, EdgeSide::left, t)).epsilon(1e-8));
}

TEST_CASE("matched pairs") {
  CHECK(matched_pair(1.2, -10.0, 2.0) == doctest::Approx(-10.0 * std::log(1.0 / 6.0) / std::log(0.5)).epsilon(1e-14));
  CHECK(matched_pair(1.2, -10.0, 2.0) == doctest::Approx(-26.22).epsilon(0.05));
  CHECK(matched_pair(1.05, -10.0, 2.0) == doctest::Approx(-44.87).epsilon(0.05));
  CHECK(matched_pair(1.01, -10.0, 2.0) == doctest::Approx(-66.58).epsilon(1e-3));
  CHECK(matched_pair(1.01, -10.0, 2.0) == doctest::Approx(-68.85).epsilon(0.05));
  CHECK(matched_pair(3.0, -7.0, 3.0) == -7.0);
  for (int k = 0; k < 50; ++k) {
    const double a = uniform(1.01, 9), b = uniform(1.01, 9), d3 = uniform(-20, 20);
    CHECK(std::abs(matched_pair(b, matched_pair(a, d3, b), a) - d3) <= 1e-14 * std::max(1.0, std::abs(d3)) * 4);
    // equal limiting widths
    CHECK(wall_positions(a, 0, 0, d3).width ==
          doctest::Approx(wall_positions(b, 0, 0, matched_pair(a, d3, b)).width).epsilon(1e-13));
  }
}

TEST_CASE("peak metrics") {
  const auto single = peak_metrics(std::vector<double>{0.3}, std::vector<double>{2.0});
  REQUIRE(single.peaks.size() == 1);
  CHECK(single.peaks[0].height == 2.0);
  CHECK_THROWS_AS(peak_metrics(std::vector<double>{}, std::vector<double>{}), std::invalid_argument);

  // Gaussian: FWHM 2 sqrt(2 ln 2), area sqrt(pi)
  const auto t = linspace(-8, 8, 4001);
  std::vector<double> g(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) g[k] = std::exp(-(t[k] - 0.01) * (t[k] - 0.01));
  const auto m = peak_metrics(t, g);
  REQUIRE(m.peaks.size() == 1);
  CHECK(m.peaks[0].t == doctest::Approx(0.01).epsilon(1e-6));
  CHECK(m.peaks[0].height == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(m.fwhm == doctest::Approx(2.0 * std::sqrt(std::log(2.0))).epsilon(1e-5));
  CHECK(m.area == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-8));

  // symmetric two-peak pulse
  const ClassId id{-1, -1, -1};
  const auto tr = sample_constant_detuning(id, real_model(2.0, 0.5, -0.5, -10.0, realizing_u0star(id, 1.0)),
                                           linspace(-30, 30, 60001));
  const auto two = peak_metrics(tr);
  REQUIRE(two.peaks.size() == 2);
  CHECK(std::abs(two.peaks[0].height - two.peaks[1].height) / two.max_abs <= 1e-6);

  // box limit: FWHM approaches the wall distance
  const ClassId box{0, 0, -2};
  const auto btr = sample_constant_detuning(box, real_model(2.0, 1e-3, -1e-3, -2.0, realizing_u0star(box, 1.0)),
                                            linspace(-5, 5, 20001));
  CHECK(peak_metrics(btr).fwhm == doctest::Approx(wall_positions(2.0, 1e-3, -1e-3, -2.0).width).epsilon(0.05));

  const auto j = to_json(two);
  CHECK(j["peaks"].size() == 2);
}
