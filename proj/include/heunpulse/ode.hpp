#pragma once

// Adaptive integration of small complex ODE systems. The stepping itself is
// Boost.Odeint's controlled Runge-Kutta-Fehlberg 7(8) pair; this header only
// adapts complex states and adds exact landing on requested output points.

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <sstream>
#include <stdexcept>

#include <boost/numeric/odeint.hpp>

#include "heunpulse/complex_math.hpp"

namespace heunpulse {

template <std::size_t N>
using ComplexState = std::array<cplx, N>;

struct OdeTolerance {
  double rel = 1e-12;
  double abs = 1e-14;
};

struct StepStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evaluations() const { return 13 * (accepted + rejected); }
};

/// Thrown when the controlled step shrinks below resolution (typically near a
/// singularity of the coefficients).
class StepUnderflow : public std::runtime_error {
 public:
  StepUnderflow(const std::string& what, double where) : std::runtime_error(what), where_(where) {}
  double where() const { return where_; }

 private:
  double where_;
};

namespace detail {

template <std::size_t N>
using RealState = std::array<double, 2 * N>;

template <std::size_t N>
RealState<N> pack(const ComplexState<N>& y) {
  RealState<N> x{};
  for (std::size_t k = 0; k < N; ++k) {
    x[2 * k] = y[k].real();
    x[2 * k + 1] = y[k].imag();
  }
  return x;
}

template <std::size_t N>
ComplexState<N> unpack(const RealState<N>& x) {
  ComplexState<N> y{};
  for (std::size_t k = 0; k < N; ++k) y[k] = {x[2 * k], x[2 * k + 1]};
  return y;
}

}  // namespace detail

/// Integrates dy/ds = f(s, y) from s0 through each point of `targets` in order,
/// calling observe(index, s, y) exactly at every target. Targets must be
/// monotone and lie on one side of s0. `y` holds the state at the last target.
template <std::size_t N, class F, class Observer>
void integrate_complex(F&& f, ComplexState<N>& y, double s0, std::span<const double> targets,
                       OdeTolerance tol, Observer&& observe, StepStats* stats = nullptr) {
  namespace odeint = boost::numeric::odeint;
  using State = detail::RealState<N>;
  using Stepper = odeint::runge_kutta_fehlberg78<State>;

  auto system = [&f](const State& x, State& dxdt, double s) {
    const ComplexState<N> dy = f(s, detail::unpack<N>(x));
    dxdt = detail::pack<N>(dy);
  };
  auto stepper = odeint::make_controlled(tol.abs, tol.rel, Stepper());

  State x = detail::pack<N>(y);
  double s = s0;
  double dt = 0.0;
  for (std::size_t k = 0; k < targets.size(); ++k) {
    const double target = targets[k];
    const double span = target - s;
    if (span == 0.0) {
      observe(k, s, detail::unpack<N>(x));
      continue;
    }
    const double dir = span > 0 ? 1.0 : -1.0;
    if (dt == 0.0 || dt * dir <= 0.0) dt = 1e-3 * span;
    const double scale = std::max({1.0, std::abs(s), std::abs(target)});
    while ((target - s) * dir > 0.0) {
      const double remaining = target - s;
      const bool clipped = std::abs(dt) >= std::abs(remaining);
      double step = clipped ? remaining : dt;
      const double before = s;
      const auto result = stepper.try_step(system, x, s, step);
      if (result == odeint::success) {
        if (stats) ++stats->accepted;
        if (clipped) s = target;  // land exactly
        // Keep the controller's suggestion unless we were clipped to a shorter step.
        if (!clipped || std::abs(step) > std::abs(dt)) dt = step;
      } else {
        if (stats) ++stats->rejected;
        dt = step;
        if (std::abs(dt) < 1e-15 * scale) {
          std::ostringstream msg;
          msg << "adaptive step underflow at s = " << before;
          throw StepUnderflow(msg.str(), before);
        }
      }
    }
    observe(k, s, detail::unpack<N>(x));
  }
  y = detail::unpack<N>(x);
}

/// Single-target convenience overload.
template <std::size_t N, class F>
ComplexState<N> integrate_complex_to(F&& f, ComplexState<N> y, double s0, double s1,
                                     OdeTolerance tol, StepStats* stats = nullptr) {
  const double target[1] = {s1};
  integrate_complex<N>(std::forward<F>(f), y, s0, std::span<const double>(target),
                       tol, [](std::size_t, double, const ComplexState<N>&) {}, stats);
  return y;
}

}  // namespace heunpulse
