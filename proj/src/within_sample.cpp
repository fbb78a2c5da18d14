#include "lrpi/within_sample.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "lrpi/errors.hpp"
#include "lrpi/families.hpp"
#include "lrpi/optimize.hpp"
#include "lrpi/special.hpp"

namespace lrpi {

namespace {

constexpr double kBad = 1e300;

double xlogy(double x, double y) {
  return x == 0.0 ? 0.0 : x * std::log(y);
}

void check_sample(const CensoredSample& s) {
  if (s.n < 1) throw UsageError("within-sample n must be >= 1");
  if (!std::isfinite(s.t_c) || !(s.t_c > 0.0))
    throw UsageError("censoring time t_c must be positive and finite");
  if (static_cast<int>(s.failure_times.size()) > s.n)
    throw UsageError("more failure times than units");
  double prev = 0.0;
  for (const double t : s.failure_times) {
    if (!std::isfinite(t) || !(t > 0.0) || t > s.t_c)
      throw SupportError("failure times must lie in (0, t_c]");
    if (t < prev) throw UsageError("failure times must be ascending");
    prev = t;
  }
}

void check_query(const CensoredSample& s, const WithinSampleQuery& q) {
  if (!std::isfinite(q.t_w) || !(q.t_w > s.t_c))
    throw UsageError("prediction horizon t_w must exceed t_c");
}

// y-independent pieces of the statistic.
struct Prep {
  int n = 0;
  int r = 0;
  double log_tc = 0.0;
  double log_tw = 0.0;
  std::vector<double> log_times;
  double sum_log = 0.0;
  FittedModel censored;          // censored ML fit; reduced-model start point
  double full_data_loglik = 0.0; // variant-resolved data factor at its own ML
};

Prep prepare_ws(const CensoredSample& s, const WithinSampleQuery& q) {
  Prep p;
  p.n = s.n;
  p.r = static_cast<int>(s.failure_times.size());
  p.log_tc = std::log(s.t_c);
  p.log_tw = std::log(q.t_w);
  p.log_times.reserve(p.r);
  for (const double t : s.failure_times) {
    p.log_times.push_back(std::log(t));
    p.sum_log += p.log_times.back();
  }
  p.censored = fit_ml_type1_censored(s.failure_times, s.n, s.t_c);
  if (q.variant == WithinSampleVariant::SurvivalAdjusted) {
    p.full_data_loglik = p.censored.log_likelihood;
  } else {
    FittedModel complete;
    try {
      complete = fit_ml(FamilySpec::make(FamilyId::Weibull), s.failure_times);
    } catch (const Error& e) {
      throw FitError(std::string("within-sample full-model fit failed "
                                 "(variant=failures-only): ") +
                     e.what());
    }
    p.full_data_loglik = complete.log_likelihood;
  }
  return p;
}

// Reduced-model log-likelihood at (log beta, log eta): failure densities,
// y failures in (t_c, t_w], n-r-y survivors past t_w. The multinomial
// constant is dropped from both models.
double reduced_loglik(const Prep& p, int y, double lb, double lh) {
  if (std::abs(lb) > 60.0 || std::abs(lh) > 60.0) return -kBad;
  const double beta = std::exp(lb);
  const double ea = beta * (p.log_tc - lh);
  const double eb = beta * (p.log_tw - lh);
  if (ea > 700.0 || eb > 700.0) return -kBad;
  double ll = p.r * lb - p.r * beta * lh + (beta - 1.0) * p.sum_log;
  for (const double lt : p.log_times) ll -= std::exp(beta * (lt - lh));
  const int tail = p.n - p.r - y;
  if (tail > 0) ll -= tail * std::exp(eb);
  if (y > 0) {
    // log[F(t_w) - F(t_c)] = -a + log(1 - e^{-(b-a)})
    const double gap = -std::expm1(-(std::exp(eb) - std::exp(ea)));
    if (!(gap > 0.0)) return -kBad;
    ll += y * (-std::exp(ea) + std::log(gap));
  }
  return std::isfinite(ll) ? ll : -kBad;
}

double statistic(const Prep& p, int y, WithinSampleVariant variant) {
  const int at_risk = p.n - p.r;
  const std::vector<double> x0{std::log(p.censored.params.at(0)),
                               std::log(p.censored.params.at(1))};
  const auto objective = [&](const std::vector<double>& v) {
    return -reduced_loglik(p, y, v[0], v[1]);
  };
  const OptimumND opt = nelder_mead_min(objective, x0, {0.25, 0.25}, 1e-13);
  if (!opt.converged || opt.f >= kBad)
    throw FitError("within-sample reduced-model fit failed (y=" +
                   std::to_string(y) + ", variant=" +
                   (variant == WithinSampleVariant::SurvivalAdjusted
                        ? "survival-adjusted"
                        : "failures-only") +
                   ")");
  const double p_hat = static_cast<double>(y) / at_risk;
  const double full = p.full_data_loglik + xlogy(y, p_hat) +
                      xlogy(at_risk - y, 1.0 - p_hat);
  return 2.0 * (full - (-opt.f));
}

}  // namespace

double within_sample_neg2_log_lr(const CensoredSample& sample,
                                 const WithinSampleQuery& query, int y) {
  check_sample(sample);
  check_query(sample, query);
  const int r = static_cast<int>(sample.failure_times.size());
  if (y < 0 || y > sample.n - r)
    throw UsageError("future failure count y must lie in 0..n-r");
  if (r == sample.n) return 0.0;  // no units at risk: the models coincide
  if (r == 0)
    throw DegenerateDataError(
        "no observed failures: Weibull parameters are unidentifiable");
  const Prep p = prepare_ws(sample, query);
  return statistic(p, y, query.variant);
}

IntegerInterval within_sample_interval(const CensoredSample& sample,
                                       const WithinSampleQuery& query) {
  check_sample(sample);
  check_query(sample, query);
  if (!(query.level > 0.0 && query.level < 1.0))
    throw UsageError("level must lie in (0,1)");
  const int r = static_cast<int>(sample.failure_times.size());
  if (r == sample.n) return {0, 0, false};
  if (r == 0)
    throw DegenerateDataError(
        "no observed failures: Weibull parameters are unidentifiable");

  const Prep p = prepare_ws(sample, query);
  const double threshold = chisq_quantile(1, query.level);
  const int top = sample.n - r;
  std::vector<double> vals(top + 1);
  int argmin = 0;
  for (int y = 0; y <= top; ++y) {
    vals[y] = statistic(p, y, query.variant);
    if (vals[y] < vals[argmin]) argmin = y;
  }
  if (vals[argmin] > threshold) return {argmin, argmin, true};
  int lo = argmin;
  while (lo > 0 && vals[lo - 1] <= threshold) --lo;
  int hi = argmin;
  while (hi < top && vals[hi + 1] <= threshold) ++hi;
  return {lo, hi, false};
}

}  // namespace lrpi
