#pragma once

#include <utility>
#include <vector>

#include "lrpi/families.hpp"

namespace lrpi {

// A prepared prediction problem. Immutable after prepare(); every evaluation
// member is pure, so contexts are safe to share across threads.
//
// full_const caches the y-free part of the full-model supremum: the log
// single-observation supremum separates as c(common) - [inv_y]*log(y), so the
// common-parameter fit never depends on y and each curve evaluation costs one
// pooled fit.
struct LrContext {
  FamilySpec spec;
  std::vector<double> data;
  FittedModel data_fit;     // ML fit of the data alone
  ParamVector full_common;  // common components of the full-model optimum
  double full_const = 0.0;  // data loglik at full_common + y-free sup term
  double y0 = 0.0;          // maximizer of the LR curve (Lambda(y0) = 1)
  Support support{0.0, 0.0};
  bool multimodal_warning = false;

  // Cached data reductions for the closed-form fast paths.
  int n = 0;
  double sum = 0.0;
  double mean = 0.0;
  double sum_sq_dev = 0.0;  // sum of (x - mean)^2
  double min_x = 0.0;
  double max_x = 0.0;
  bool fast_path = false;
};

struct LrCurvePoint {
  double y;
  double neg2_log_lr;
  double signed_value;
};

LrContext prepare(const FamilySpec& spec, const std::vector<double>& data);

// Bootstrap replicates reuse the parent's fitted parameters as warm starts for
// the numeric families; identical contract otherwise.
LrContext prepare_warm(const FamilySpec& spec, const std::vector<double>& data,
                       const LrContext& parent);

// Full-model ML at fixed y: the common components together with the varied
// component's analytic maximizer.
std::pair<ParamVector, double> joint_full_ml(const LrContext& ctx, double y);

// -2 log Lambda_n(x, y); closed form for the five exact families, pooled-fit
// generic path otherwise. Always >= 0 up to a 1e-8 clamp.
double neg2_log_lr(const LrContext& ctx, double y);

// Generic-optimizer path regardless of family; exists so tests can assert
// closed-form agreement.
double neg2_log_lr_generic(const LrContext& ctx, double y);

// Signed statistic: -(statistic) below y0, +(statistic) above.
double signed_lr(const LrContext& ctx, double y);

// Golden-section minimizer of the curve from an expanding bracket; the engine
// itself uses closed forms for y0, this exists as the search contract and for
// cross-checks. Sets *multimodal on a detected three-point violation.
double mode_y0_search(const LrContext& ctx, bool* multimodal = nullptr);

// Simple-regression prediction statistic at x_new: (n+1) log(1 + T^2/(n-2))
// with T the studentized prediction residual.
double regression_neg2_log_lr(const std::vector<double>& covariates,
                              const std::vector<double>& responses, double x_new,
                              double y);

std::vector<LrCurvePoint> lr_curve(const LrContext& ctx, double lo, double hi,
                                   int points);

}  // namespace lrpi
