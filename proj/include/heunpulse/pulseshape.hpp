#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "heunpulse/fields.hpp"

namespace heunpulse {

/// Discriminant of the crossing polynomial, D = B^2 - 4 A C.
double crossing_discriminant(double a, double d1, double d2, double d3);

enum class FreeParameter { a, d3 };

/// One solution of D = 0 for the free parameter.
struct NarrowPulseRoot {
  double value = 0.0;
  /// Double root of P(z), B / (2A).
  double z0 = 0.0;
  /// |D| at the returned value.
  double discriminant = 0.0;
  bool admissible = false;
  /// Why the root was rejected; empty when admissible.
  std::string reason;
};

/// Roots of D = 0 with respect to `free` (the corresponding argument is ignored).
/// A root is admissible when z0 lies in (0, 1) by more than 1e-12 and, for free a, a > 1.
/// Throws std::invalid_argument when D does not depend on the free parameter.
std::vector<NarrowPulseRoot> narrow_pulse_roots(FreeParameter free, double a, double d1, double d2, double d3);

/// Limiting vertical-wall positions t1 = t0 + d3 ln a / Delta, t2 = t0 + d3 ln(a-1) / Delta
/// and the width t2 - t1; t0 is evaluated with all three d_j.
struct WallPositions {
  double t0 = 0.0;
  double t1 = 0.0;
  double t2 = 0.0;
  double width = 0.0;
};
WallPositions wall_positions(double a, double d1, double d2, double d3, double Delta = 1.0);

/// Real Lambert W on branch 0 (x >= -1/e) or -1 (-1/e <= x < 0). Throws std::domain_error.
double lambert_w(int branch, double x);

enum class EdgeSide { left, right };

struct EdgeApproximation {
  double z = 0.0;
  /// Lambert branch that produced z.
  int branch = 0;
};

/// Lambert-W description of z(t) near z = 0 (left) or z = 1 (right), keeping the
/// constant and linear terms of the remaining logarithms. Throws std::domain_error when
/// neither branch yields z in (0, 1).
EdgeApproximation edge_approximation(const ModelParams& p, EdgeSide side, double t);
/// Constant-term-only version, z = exp((Delta (t - t0) - d3 ln a) / d1) on the left and
/// 1 - z = exp((Delta (t - t0) - d3 ln(a-1)) / d2) on the right. Not clamped to (0, 1).
double exponential_edge(const ModelParams& p, EdgeSide side, double t);
/// Time at which the exponential edge reaches the far end of (0, 1): t1 on the left, t2 on the right.
double exponential_edge_divergence(const ModelParams& p, EdgeSide side);

/// d3 giving the same limiting width at a_target: d3 ln((a-1)/a) = d3_target ln((a_t-1)/a_t).
double matched_pair(double a, double d3, double a_target);

struct Peak {
  double t = 0.0;
  double height = 0.0;
};

struct PeakMetrics {
  std::vector<Peak> peaks;
  /// Width at half the largest |U|, between the outermost half-maximum crossings.
  double fwhm = 0.0;
  /// Trapezoid integral of U.
  double area = 0.0;
  double max_abs = 0.0;
};

/// Peaks of |U| (strict discrete maxima refined by a parabola through three samples).
/// Throws std::invalid_argument on an empty or mismatched trace.
PeakMetrics peak_metrics(const std::vector<double>& t, const std::vector<double>& U);
inline PeakMetrics peak_metrics(const PulseTrace& trace) { return peak_metrics(trace.t, trace.U); }

nlohmann::json to_json(const PeakMetrics& m);
nlohmann::json to_json(const WallPositions& w);
nlohmann::json to_json(const NarrowPulseRoot& r);

}  // namespace heunpulse
