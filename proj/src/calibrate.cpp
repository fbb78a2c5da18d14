#include "lrpi/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "lrpi/errors.hpp"
#include "lrpi/parallel.hpp"
#include "lrpi/rng.hpp"
#include "lrpi/special.hpp"

namespace lrpi {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

void check_level(double level) {
  if (!(level > 0.0 && level < 1.0)) throw UsageError("level must lie in (0,1)");
}

// One bootstrap replicate for slot = b + B*attempt: fully determined by
// (seed, slot), so scheduling cannot affect the draw.
double replicate_zeta(const LrContext& ctx, std::uint64_t seed, std::uint64_t slot) {
  Rng rng = Rng::stream(seed, slot);
  std::vector<double> xs(ctx.data.size());
  for (double& x : xs) x = sample_one(ctx.spec, ctx.data_fit.params, rng);
  const double y = sample_one(ctx.spec, ctx.data_fit.params, rng);
  const LrContext rep = prepare_warm(ctx.spec, xs, ctx);
  const double lam = neg2_log_lr(rep, y);
  return y <= rep.y0 ? -lam : lam;
}

// Body shared by the parallel kernel and the serial reference; returns the
// number of failed attempts and leaves unrecovered slots as NaN.
int bootstrap_slot(const LrContext& ctx, const CalibrationSpec& spec, int b,
                   double* zeta_out) {
  int failed = 0;
  for (int attempt = 0; attempt <= spec.max_retries; ++attempt) {
    const std::uint64_t slot =
        static_cast<std::uint64_t>(b) +
        static_cast<std::uint64_t>(spec.B) * static_cast<std::uint64_t>(attempt);
    try {
      *zeta_out = replicate_zeta(ctx, spec.seed, slot);
      return failed;
    } catch (const std::exception&) {
      ++failed;
    }
  }
  return failed;
}

CalibrationResult bootstrap_finish(const CalibrationSpec& spec,
                                   const std::vector<double>& zeta, int soft_failures) {
  std::vector<double> zets, lams;
  zets.reserve(zeta.size());
  lams.reserve(zeta.size());
  for (double z : zeta) {
    if (std::isnan(z)) continue;
    zets.push_back(z);
    lams.push_back(std::fabs(z));
  }
  const int hard = spec.B - static_cast<int>(zets.size());
  if (hard > 0.02 * spec.B)
    throw CalibrationError(std::to_string(hard) + " of " + std::to_string(spec.B) +
                           " bootstrap replicates failed after retries");

  CalibrationResult out;
  out.lambda_hi = empirical_quantile(lams, 1.0 - spec.level);
  out.zeta_lo = empirical_quantile(zets, spec.level);
  out.zeta_hi = empirical_quantile(zets, 1.0 - spec.level);
  out.replicates_used = static_cast<int>(zets.size());
  out.replicate_failures = soft_failures;
  out.method = CalibrationMethod::Bootstrap;
  out.seed = spec.seed;
  return out;
}

void check_bootstrap_pre(const LrContext& ctx, const CalibrationSpec& spec) {
  if (spec.method != CalibrationMethod::Bootstrap)
    throw UsageError("calibration spec is not configured for bootstrap");
  check_level(spec.level);
  if (spec.B < 100) throw UsageError("bootstrap needs B >= 100");
  if (spec.max_retries < 0) throw UsageError("max_retries must be >= 0");
  if (!ctx.data_fit.converged) throw CalibrationError("data fit did not converge");
}

// Population analogue of the curve mode: the y where the fitted density
// attains single_obs_sup.
double limit_mode(const FamilySpec& spec, const ParamVector& params) {
  switch (spec.id) {
    case FamilyId::Normal:
    case FamilyId::NormalKnownSigma:
    case FamilyId::TwoParamExponential: return params.at(0);
    case FamilyId::Exponential:
    case FamilyId::UniformZeroTheta: return params.at(0);
    case FamilyId::Gamma: return params.at(0) * params.at(1);
    case FamilyId::Weibull: return params.at(1);
    case FamilyId::GeneralizedGamma: return std::exp(params.at(0));
  }
  throw ParamDomainError("unknown family");
}

bool limit_supported(FamilyId id) {
  switch (id) {
    case FamilyId::Normal:
    case FamilyId::Exponential:
    case FamilyId::TwoParamExponential:
    case FamilyId::UniformZeroTheta:
    case FamilyId::Gamma:
    case FamilyId::Weibull: return true;
    default: return false;
  }
}

struct LimitDraw {
  double lambda;  // variable in the requested form
  double zeta;    // signed, always the nonnegative form
};

LimitDraw limit_draw(const FamilySpec& spec, const ParamVector& params, double mode,
                     GammaLimitForm form, std::uint64_t seed, std::uint64_t d) {
  Rng rng = Rng::stream(seed, d);
  const double y = sample_one(spec, params, rng);
  double v = -2.0 * (log_density(spec, params, y) - log_single_obs_sup(spec, params, y));
  if (v < 0.0) v = 0.0;  // fp noise at the mode only
  LimitDraw out;
  out.zeta = y <= mode ? -v : v;
  out.lambda = v;
  if (spec.id == FamilyId::Gamma && form == GammaLimitForm::ShiftedLog) {
    const double a = params.at(0);
    out.lambda = v - 2.0 * a * std::log(a);
  }
  return out;
}

LimitCalibration limit_finish(double level, std::vector<double>& lams,
                              std::vector<double>& zets) {
  LimitCalibration out;
  out.lambda_hi = empirical_quantile(lams, 1.0 - level);
  out.zeta_lo = empirical_quantile(zets, level);
  out.zeta_hi = empirical_quantile(zets, 1.0 - level);
  out.analytic = false;
  return out;
}

bool limit_pre(const FamilySpec& spec, const FittedModel& fitted, double level,
               int draws, LimitCalibration* shortcut) {
  check_level(level);
  if (!limit_supported(spec.id))
    throw CalibrationError("no one-component limit law for family " +
                           std::string(family_name(spec.id)));
  if (!fitted.converged) throw CalibrationError("plug-in fit did not converge");
  if (spec.id == FamilyId::UniformZeroTheta) {
    // theta_hat cancels: lambda ~ chi^2_2 exactly and P(zeta <= 2 log p) = p.
    shortcut->lambda_hi = chisq_quantile(2, 1.0 - level);
    shortcut->zeta_lo = 2.0 * std::log(level);
    shortcut->zeta_hi = 2.0 * std::log(1.0 - level);
    shortcut->analytic = true;
    return true;
  }
  if (draws < 100) throw UsageError("limit calibration needs draws >= 100");
  return false;
}

}  // namespace

double empirical_quantile(std::vector<double> values, double p) {
  if (values.empty()) throw UsageError("quantile of an empty sample");
  if (!(p > 0.0 && p < 1.0)) throw UsageError("quantile level must lie in (0,1)");
  std::sort(values.begin(), values.end());
  const double v = static_cast<double>(values.size()) * p;
  const double fl = std::floor(v);
  // ceil with a one-sided guard against upward fp noise at integer B*p
  std::size_t k = (v - fl < 1e-6) ? static_cast<std::size_t>(fl)
                                  : static_cast<std::size_t>(fl) + 1;
  k = std::max<std::size_t>(k, 1);
  k = std::min(k, values.size());
  return values[k - 1];
}

CalibrationResult bootstrap_calibrate(const LrContext& ctx, const CalibrationSpec& spec,
                                      int threads) {
  check_bootstrap_pre(ctx, spec);
  const int nt = resolve_threads(threads);
  std::vector<double> zeta(spec.B, kNan);
  int soft = 0;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16) num_threads(nt) reduction(+ : soft)
#endif
  for (int b = 0; b < spec.B; ++b) {
    soft += bootstrap_slot(ctx, spec, b, &zeta[b]);
  }
  (void)nt;
  return bootstrap_finish(spec, zeta, soft);
}

CalibrationResult bootstrap_calibrate_serial(const LrContext& ctx,
                                             const CalibrationSpec& spec) {
  check_bootstrap_pre(ctx, spec);
  std::vector<double> zeta(spec.B, kNan);
  int soft = 0;
  for (int b = 0; b < spec.B; ++b) {
    soft += bootstrap_slot(ctx, spec, b, &zeta[b]);
  }
  return bootstrap_finish(spec, zeta, soft);
}

CalibrationResult chisq_calibrate(const CalibrationSpec& spec) {
  if (spec.method != CalibrationMethod::ChiSquare)
    throw UsageError("calibration spec is not configured for chi-square");
  check_level(spec.level);
  if (spec.dof != 1 && spec.dof != 2) throw UsageError("chi-square dof must be 1 or 2");

  CalibrationResult out;
  out.lambda_hi = chisq_quantile(spec.dof, 1.0 - spec.level);
  const double z = normal_quantile(1.0 - spec.level);
  out.zeta_hi = (spec.level < 0.5 ? 1.0 : -1.0) * z * z;
  out.zeta_lo = -out.zeta_hi;
  out.method = CalibrationMethod::ChiSquare;
  out.seed = spec.seed;
  return out;
}

LimitCalibration limit_calibrate(const FamilySpec& spec, const FittedModel& fitted,
                                 double level, int draws, std::uint64_t seed,
                                 GammaLimitForm form, int threads) {
  LimitCalibration shortcut;
  if (limit_pre(spec, fitted, level, draws, &shortcut)) return shortcut;

  const double mode = limit_mode(spec, fitted.params);
  const int nt = resolve_threads(threads);
  std::vector<double> lams(draws), zets(draws);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(nt)
#endif
  for (int d = 0; d < draws; ++d) {
    const LimitDraw dr = limit_draw(spec, fitted.params, mode, form, seed,
                                    static_cast<std::uint64_t>(d));
    lams[d] = dr.lambda;
    zets[d] = dr.zeta;
  }
  (void)nt;
  return limit_finish(level, lams, zets);
}

LimitCalibration limit_calibrate_serial(const FamilySpec& spec, const FittedModel& fitted,
                                        double level, int draws, std::uint64_t seed,
                                        GammaLimitForm form) {
  LimitCalibration shortcut;
  if (limit_pre(spec, fitted, level, draws, &shortcut)) return shortcut;

  const double mode = limit_mode(spec, fitted.params);
  std::vector<double> lams(draws), zets(draws);
  for (int d = 0; d < draws; ++d) {
    const LimitDraw dr = limit_draw(spec, fitted.params, mode, form, seed,
                                    static_cast<std::uint64_t>(d));
    lams[d] = dr.lambda;
    zets[d] = dr.zeta;
  }
  return limit_finish(level, lams, zets);
}

}  // namespace lrpi
