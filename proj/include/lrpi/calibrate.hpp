#pragma once

#include <cstdint>
#include <vector>

#include "lrpi/lr_engine.hpp"

namespace lrpi {

// PlugIn is no LR calibration at all: it labels results of the naive
// predictive-quantile interval (simstudy baseline and the CLI plugin method).
enum class CalibrationMethod { Bootstrap, ChiSquare, LimitPlugin, PlugIn };

struct CalibrationSpec {
  CalibrationMethod method = CalibrationMethod::Bootstrap;
  double level = 0.05;  // alpha
  int B = 5000;         // bootstrap replicates
  std::uint64_t seed = 0;
  int max_retries = 8;  // fresh sub-seed attempts per failed replicate
  int dof = 1;          // ChiSquare only; 1 or 2
};

struct CalibrationResult {
  double lambda_hi = 0.0;  // 1-alpha quantile of |zeta*|: two-sided threshold
  double zeta_lo = 0.0;    // alpha quantile of zeta*: lower-bound threshold
  double zeta_hi = 0.0;    // 1-alpha quantile of zeta*: upper-bound threshold
  int replicates_used = 0;
  int replicate_failures = 0;  // attempts that threw (retries included)
  CalibrationMethod method = CalibrationMethod::Bootstrap;
  std::uint64_t seed = 0;
};

// ceil(n*p)-th ascending order statistic, 1-based.
double empirical_quantile(std::vector<double> values, double p);

// Parametric bootstrap of the prediction statistic. Per replicate b: draw
// (x*_1..x*_n, y*) iid from the fitted model, rebuild the replicate's own
// curve (its mode included), record zeta*_b and lambda*_b = |zeta*_b|.
// Sub-seeds derive from (seed, b) by counter, so results are bit-identical
// for any thread count. threads <= 0 resolves via LRPI_THREADS, then the
// OpenMP default.
CalibrationResult bootstrap_calibrate(const LrContext& ctx, const CalibrationSpec& spec,
                                      int threads = 0);

// Single-threaded reference loop; bit-identical to bootstrap_calibrate.
CalibrationResult bootstrap_calibrate_serial(const LrContext& ctx,
                                             const CalibrationSpec& spec);

// Wilks thresholds: lambda_hi = chi^2_dof(1-alpha). Signed thresholds use the
// symmetric normal-square convention zeta_hi = -zeta_lo = sign(1/2-alpha) *
// (Phi^-1(1-alpha))^2, which equals chi^2_1(1-2*alpha) for alpha < 1/2.
CalibrationResult chisq_calibrate(const CalibrationSpec& spec);

// Two algebraic forms of the gamma limit variable in Z ~ Gamma(alpha, 1):
// NonNegative uses 2(Z-a) - 2a*log(Z/a) (minimum 0 at Z=a); ShiftedLog uses
// log Z in place of log(Z/a), differing by the constant -2a*log(a) and able
// to go negative. ShiftedLog exists for comparison only and affects lambda_hi
// alone; signed thresholds always use the NonNegative form.
enum class GammaLimitForm { NonNegative, ShiftedLog };

struct LimitCalibration {
  double lambda_hi = 0.0;
  double zeta_lo = 0.0;
  double zeta_hi = 0.0;
  bool analytic = false;  // true when the exact chi^2_2 shortcut applied
};

// Limit-distribution thresholds with plug-in parameters: quantiles of
// -2 log[ f(Y; theta_hat) / single_obs_sup(Y; theta_hat) ], Y ~ f(.;
// theta_hat), by Monte Carlo; UniformZeroTheta has the exact shortcut
// lambda ~ chi^2_2, zeta_p = 2 log p. Families without a one-component
// limit law here (NormalKnownSigma, GeneralizedGamma) are rejected.
LimitCalibration limit_calibrate(const FamilySpec& spec, const FittedModel& fitted,
                                 double level, int draws, std::uint64_t seed,
                                 GammaLimitForm form = GammaLimitForm::NonNegative,
                                 int threads = 0);

// Single-threaded reference loop; bit-identical to limit_calibrate.
LimitCalibration limit_calibrate_serial(const FamilySpec& spec, const FittedModel& fitted,
                                        double level, int draws, std::uint64_t seed,
                                        GammaLimitForm form = GammaLimitForm::NonNegative);

}  // namespace lrpi
