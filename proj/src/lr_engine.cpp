#include "lrpi/lr_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "lrpi/errors.hpp"
#include "lrpi/optimize.hpp"

namespace lrpi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_y(const LrContext& ctx, double y) {
  if (!std::isfinite(y)) throw SupportError("predictand must be finite");
  if (ctx.support.lo > -kInf && !(y > ctx.support.lo))
    throw SupportError("predictand outside the family support");
}

// Mathematically -2 log Lambda >= 0 (the pooled point is feasible for the full
// model); anything below the clamp means a fit failed to converge.
double clamp_nonneg(double v) {
  if (v >= 0.0) return v + 0.0;  // +0.0 normalizes -0.0
  if (v >= -1e-8) return 0.0;
  throw FitError("pooled likelihood exceeded the full-model supremum");
}

bool uses_fast_path(FamilyId id) {
  switch (id) {
    case FamilyId::Normal:
    case FamilyId::NormalKnownSigma:
    case FamilyId::Exponential:
    case FamilyId::TwoParamExponential:
    case FamilyId::UniformZeroTheta: return true;
    default: return false;
  }
}

// Full-model common components: argmax over theta of
// data loglik(theta) + log_sup_common_term(theta). Closed forms where the
// data-only fit admits them; the numeric families reuse the family solvers
// with the supremum term folded in.
ParamVector full_common_fit(const FamilySpec& spec, const LrContext& ctx,
                            const ParamVector* warm) {
  const double n = static_cast<double>(ctx.n);
  switch (spec.id) {
    case FamilyId::Normal:
      return ParamVector::normal(ctx.mean, std::sqrt(ctx.sum_sq_dev / (n + 1.0)));
    case FamilyId::NormalKnownSigma:
      return ParamVector::normal_known_sigma(ctx.mean);
    case FamilyId::Exponential:
      return ParamVector::exponential(ctx.mean);
    case FamilyId::TwoParamExponential:
      return ParamVector::two_param_exponential(ctx.min_x,
                                                (ctx.sum - n * ctx.min_x) / (n + 1.0));
    case FamilyId::UniformZeroTheta:
      return ParamVector::uniform(ctx.max_x);
    case FamilyId::Gamma: {
      // Same shape equation as the plain fit with M scaled by n/(n+1).
      double mean_log = 0.0;
      for (double x : ctx.data) mean_log += std::log(x);
      mean_log /= n;
      const double m_full = n * (std::log(ctx.mean) - mean_log) / (n + 1.0);
      const double init = warm != nullptr ? warm->at(0) : -1.0;
      const double alpha = detail::solve_gamma_shape(m_full, init);
      return ParamVector::gamma(alpha, ctx.mean / alpha);
    }
    case FamilyId::Weibull: {
      // Same profile equation as the plain fit with the 1/beta term scaled by
      // (n+1)/n; the supremum term carries no eta dependence.
      const double init = warm != nullptr ? warm->at(0) : -1.0;
      const detail::WeibullProfileFit sol =
          detail::weibull_profile_ml(ctx.data, (n + 1.0) / n, init);
      return ParamVector::weibull(sol.beta, sol.eta);
    }
    case FamilyId::GeneralizedGamma:
      return detail::gg_penalized_fit(ctx.data, true, warm).params;
  }
  throw ParamDomainError("unknown family");
}

// Lambda(y0) = 1: the y at which the varied component's maximizer coincides
// with the full-model common fit.
double closed_form_y0(const LrContext& ctx) {
  switch (ctx.spec.id) {
    case FamilyId::Normal:
    case FamilyId::NormalKnownSigma:
    case FamilyId::Exponential:
    case FamilyId::Gamma: return ctx.mean;
    case FamilyId::TwoParamExponential: return ctx.min_x;
    case FamilyId::UniformZeroTheta: return ctx.max_x;
    case FamilyId::Weibull: return ctx.full_common.at(1);
    case FamilyId::GeneralizedGamma: return std::exp(ctx.full_common.at(0));
  }
  throw ParamDomainError("unknown family");
}

double fast_neg2_log_lr(const LrContext& ctx, double y) {
  const double n = static_cast<double>(ctx.n);
  switch (ctx.spec.id) {
    case FamilyId::Normal: {
      const double d = y - ctx.mean;
      return (n + 1.0) * std::log1p(n * d * d / ((n + 1.0) * ctx.sum_sq_dev));
    }
    case FamilyId::NormalKnownSigma: {
      const double z = (y - ctx.mean) / ctx.spec.known_sigma;
      return n / (n + 1.0) * z * z;
    }
    case FamilyId::Exponential: {
      const double pooled = (ctx.sum + y) / (n + 1.0);
      return clamp_nonneg(-2.0 * (n * std::log(ctx.mean) + std::log(y) -
                                  (n + 1.0) * std::log(pooled)));
    }
    case FamilyId::TwoParamExponential: {
      const double num = ctx.sum - n * ctx.min_x;
      const double extra = y >= ctx.min_x ? y - ctx.min_x : n * (ctx.min_x - y);
      return 2.0 * (n + 1.0) * std::log1p(extra / num);
    }
    case FamilyId::UniformZeroTheta:
      return y <= ctx.max_x ? 2.0 * std::log(ctx.max_x / y)
                            : 2.0 * n * std::log(y / ctx.max_x);
    default: break;
  }
  throw ParamDomainError("no closed form for this family");
}

double generic_neg2_log_lr(const LrContext& ctx, double y) {
  std::vector<double> pooled = ctx.data;
  pooled.push_back(y);
  const FittedModel pooled_fit = fit_ml_warm(ctx.spec, pooled, ctx.data_fit.params);
  const double inv_y = sup_has_inv_y(ctx.spec.id) ? std::log(y) : 0.0;
  const double log_full_sup = ctx.full_const - inv_y;
  const double v = -2.0 * (pooled_fit.log_likelihood - log_full_sup);
  if (v < -1e-8 && ctx.spec.id == FamilyId::GeneralizedGamma &&
      std::abs(pooled_fit.params.at(2)) >= detail::kGgLambdaBound - 1e-6) {
    // The pooled optimum ran to the shape bound while the full-model fit is
    // the interior mode: the likelihood degenerates toward a spike and the
    // statistic is undefined this far out.
    throw FitError("likelihood degenerates at the shape bound; "
                   "statistic undefined this far from the data");
  }
  return clamp_nonneg(v);
}

LrContext prepare_impl(const FamilySpec& spec, const std::vector<double>& data,
                       const LrContext* parent) {
  LrContext ctx;
  ctx.spec = spec;
  ctx.data = data;
  ctx.support = family_support(spec.id);
  ctx.data_fit = parent != nullptr ? fit_ml_warm(spec, data, parent->data_fit.params)
                                   : fit_ml(spec, data);
  ctx.n = static_cast<int>(data.size());
  ctx.sum = std::accumulate(data.begin(), data.end(), 0.0);
  ctx.mean = ctx.sum / ctx.n;
  ctx.sum_sq_dev = 0.0;
  for (double x : data) ctx.sum_sq_dev += (x - ctx.mean) * (x - ctx.mean);
  const auto [mn, mx] = std::minmax_element(data.begin(), data.end());
  ctx.min_x = *mn;
  ctx.max_x = *mx;
  ctx.fast_path = uses_fast_path(spec.id);

  const ParamVector* warm = parent != nullptr ? &parent->full_common : nullptr;
  ctx.full_common = full_common_fit(spec, ctx, warm);
  ctx.full_const = log_likelihood(spec, ctx.full_common, data) +
                   log_sup_common_term(spec, ctx.full_common);
  ctx.y0 = closed_form_y0(ctx);
  return ctx;
}

}  // namespace

LrContext prepare(const FamilySpec& spec, const std::vector<double>& data) {
  return prepare_impl(spec, data, nullptr);
}

LrContext prepare_warm(const FamilySpec& spec, const std::vector<double>& data,
                       const LrContext& parent) {
  return prepare_impl(spec, data, &parent);
}

std::pair<ParamVector, double> joint_full_ml(const LrContext& ctx, double y) {
  check_y(ctx, y);
  return {ctx.full_common, varied_argmax(ctx.spec, ctx.full_common, y)};
}

double neg2_log_lr(const LrContext& ctx, double y) {
  check_y(ctx, y);
  return ctx.fast_path ? fast_neg2_log_lr(ctx, y) : generic_neg2_log_lr(ctx, y);
}

double neg2_log_lr_generic(const LrContext& ctx, double y) {
  check_y(ctx, y);
  return generic_neg2_log_lr(ctx, y);
}

double signed_lr(const LrContext& ctx, double y) {
  const double v = neg2_log_lr(ctx, y);
  return y <= ctx.y0 ? -v : v;
}

double mode_y0_search(const LrContext& ctx, bool* multimodal) {
  if (multimodal != nullptr) *multimodal = false;
  const auto f = [&ctx](double y) { return neg2_log_lr(ctx, y); };

  const double spread =
      ctx.n > 1 ? std::sqrt(ctx.sum_sq_dev / (ctx.n - 1)) : std::abs(ctx.mean);
  const double step0 = std::max({spread, 0.05 * std::abs(ctx.mean), 1e-8});
  const double lo_limit =
      ctx.support.lo > -kInf ? ctx.support.lo + 1e-12 * (1.0 + std::abs(ctx.min_x))
                             : ctx.mean - 1e8 * step0;
  const double hi_limit = ctx.mean + 1e8 * step0;

  const MinBracket br = expand_min_bracket(f, ctx.mean, step0, lo_limit, hi_limit);
  if (!br.ok) throw BracketError("could not bracket the LR curve minimum");
  const double xtol = 1e-10 * (1.0 + std::abs(ctx.mean) + spread);
  const Optimum1D opt = golden_section_min(f, br.lo, br.hi, xtol);

  if (multimodal != nullptr) {
    // One descending-to-ascending transition across the bracket is the
    // unimodal signature; a second descent flags the curve.
    const int kScan = 64;
    double prev = f(br.lo);
    int descents = 0;
    bool descending = false;
    for (int i = 1; i <= kScan; ++i) {
      const double yi = br.lo + (br.hi - br.lo) * i / kScan;
      const double fi = f(yi);
      const double tol = 1e-9 * (1.0 + std::abs(fi));
      if (fi < prev - tol) {
        if (!descending) ++descents;
        descending = true;
      } else if (fi > prev + tol) {
        descending = false;
      }
      prev = fi;
    }
    if (descents > 1) *multimodal = true;
  }
  return opt.x;
}

double regression_neg2_log_lr(const std::vector<double>& covariates,
                              const std::vector<double>& responses, double x_new,
                              double y) {
  if (covariates.size() != responses.size())
    throw UsageError("covariate and response lengths differ");
  const int n = static_cast<int>(covariates.size());
  if (n < 3) throw DegenerateDataError("regression needs at least 3 observations");
  if (!std::isfinite(x_new) || !std::isfinite(y))
    throw SupportError("prediction point must be finite");

  const double xbar = std::accumulate(covariates.begin(), covariates.end(), 0.0) / n;
  const double ybar = std::accumulate(responses.begin(), responses.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (covariates[i] - xbar) * (covariates[i] - xbar);
    sxy += (covariates[i] - xbar) * (responses[i] - ybar);
  }
  if (!(sxx > 0.0)) throw DegenerateDataError("covariate values are all equal");
  const double b1 = sxy / sxx;
  const double b0 = ybar - b1 * xbar;
  double sse = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = responses[i] - b0 - b1 * covariates[i];
    sse += r * r;
  }
  if (!(sse > 0.0)) throw DegenerateDataError("regression fit is exact; zero residual");

  const double s2 = sse / (n - 2);
  const double lev = 1.0 / n + (x_new - xbar) * (x_new - xbar) / sxx;
  const double r_new = y - b0 - b1 * x_new;
  const double t2 = r_new * r_new / (s2 * (1.0 + lev));
  return (n + 1.0) * std::log1p(t2 / (n - 2));
}

std::vector<LrCurvePoint> lr_curve(const LrContext& ctx, double lo, double hi,
                                   int points) {
  if (points < 2) throw UsageError("curve needs at least 2 points");
  if (!(lo < hi)) throw UsageError("curve range is empty");
  std::vector<LrCurvePoint> out;
  out.reserve(points);
  for (int i = 0; i < points; ++i) {
    const double y = lo + (hi - lo) * i / (points - 1);
    const double v = neg2_log_lr(ctx, y);
    out.push_back({y, v, y <= ctx.y0 ? -v : v});
  }
  return out;
}

}  // namespace lrpi
