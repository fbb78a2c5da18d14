#pragma once

#include <vector>

#include "lrpi/discrete.hpp"

namespace lrpi {

// Type-I-censored Weibull observation: r = failure_times.size() units failed
// at the recorded times, n - r were still running at t_c.
struct CensoredSample {
  std::vector<double> failure_times;  // ascending, all in (0, t_c]
  int n = 0;
  double t_c = 0.0;
};

// How the full model treats the data factor once the future-failure
// probability becomes a free parameter. SurvivalAdjusted keeps the
// [1-F(t_c)]^(n-r) survivor factor alongside the failure densities (the full
// model's theta-hat is then the censored ML fit); FailuresOnly drops the
// survivor factor and fits the recorded failure times alone.
enum class WithinSampleVariant { SurvivalAdjusted, FailuresOnly };

struct WithinSampleQuery {
  double t_w = 0.0;     // prediction horizon, > t_c
  double level = 0.95;  // confidence 1 - alpha
  WithinSampleVariant variant = WithinSampleVariant::SurvivalAdjusted;
};

// -2 log LR for "y of the n-r survivors fail in (t_c, t_w]": shared-theta
// model with the failure count bound to p(theta) versus the enlarged model
// with a free binomial probability (p-hat = y/(n-r)). Slightly negative
// values down to -1e-8 can occur from the numeric theta maximization.
double within_sample_neg2_log_lr(const CensoredSample& sample,
                                 const WithinSampleQuery& query, int y);

// Contiguous integer set {y: statistic <= chi-square(1) quantile at level},
// scanned over 0..n-r; argmin singleton with below_nominal if nothing passes.
IntegerInterval within_sample_interval(const CensoredSample& sample,
                                       const WithinSampleQuery& query);

}  // namespace lrpi
