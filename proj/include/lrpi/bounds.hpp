#pragma once

#include <limits>
#include <utility>
#include <vector>

#include "lrpi/calibrate.hpp"

namespace lrpi {

enum class Side { Lower, Upper, TwoSided };

struct PredictionResult {
  double lower = 0.0;
  double upper = 0.0;
  // Set when the curve never reaches the threshold before the support edge;
  // the endpoint is then the support boundary itself, not a root.
  bool lower_at_boundary = false;
  bool upper_at_boundary = false;
  double level = 0.0;  // confidence level 1 - alpha
  CalibrationMethod method = CalibrationMethod::Bootstrap;

  // Diagnostics.
  double y0 = 0.0;
  double lambda = std::numeric_limits<double>::quiet_NaN();
  double zeta_lo = std::numeric_limits<double>::quiet_NaN();
  double zeta_hi = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
  int bracket_expansions = 0;
  bool multimodal = false;
  // Scan-fallback pieces of {y: curve <= threshold} when multimodal.
  std::vector<std::pair<double, double>> components;
};

// {y: -2 log Lambda(x, y) <= threshold}: bisection on each side of the curve
// mode after geometric bracket expansion. Contexts flagged multimodal take a
// 4096-point scan and return the hull with the component list.
PredictionResult two_sided_interval(const LrContext& ctx, double threshold, double level,
                                    CalibrationMethod method = CalibrationMethod::Bootstrap);

// One-sided bound from a signed-statistic threshold: upper bounds invert
// zeta(y) = zeta_threshold with zeta nondecreasing in y (threshold >= 0 lands
// right of the mode, < 0 left of it); lower bounds mirror. Returns the
// support edge when the curve never reaches the threshold on that side.
double one_sided_bound(const LrContext& ctx, double zeta_threshold, Side side,
                       double level);

// Equal-tail composition [lower(zeta_lo), upper(zeta_hi)].
PredictionResult equal_tail_interval(const LrContext& ctx, double zeta_lo,
                                     double zeta_hi, double level,
                                     CalibrationMethod method = CalibrationMethod::Bootstrap);

// Membership tests used by coverage studies: no root finding, one statistic
// evaluation each.
bool two_sided_covers(const LrContext& ctx, double y, double lambda);
bool upper_covers(const LrContext& ctx, double y, double zeta_hi);
bool lower_covers(const LrContext& ctx, double y, double zeta_lo);

}  // namespace lrpi
