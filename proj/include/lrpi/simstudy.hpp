#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lrpi/bounds.hpp"
#include "lrpi/calibrate.hpp"
#include "lrpi/families.hpp"
#include "lrpi/within_sample.hpp"

namespace lrpi {

enum class CoverageMethod { LrBootstrap, LrChiSquare, LrLimit, PlugIn };

std::string to_string(CoverageMethod method);
std::string to_string(Side side);

// Quantile interval of the fitted predictive distribution, no calibration:
// equal-tail [F^-1(a/2), F^-1(1-a/2)] two-sided (a = 1-level), F^-1(level)
// upper, F^-1(1-level) lower. y0 reports the fitted median.
PredictionResult plug_in_interval(const FamilySpec& spec,
                                  const std::vector<double>& data, double level,
                                  Side side = Side::TwoSided);

// One factor point of a continuous-family experiment; the label names what
// varies across the grid in the report (sample size, a shape parameter, ...).
struct ContinuousPoint {
  ParamVector truth;
  int n = 10;
  std::string factor_name = "n";
  double factor_value = 10.0;
};

struct CoverageConfig {
  enum class Kind { Continuous, Binomial, Poisson, WithinSample };
  Kind kind = Kind::Continuous;

  // Continuous studies: per dataset draw n points + one predictand from
  // truth, build the interval/bound per method, check membership.
  FamilySpec spec;
  std::vector<ContinuousPoint> points;
  std::vector<CoverageMethod> methods{CoverageMethod::LrBootstrap};
  int B = 1000;              // bootstrap replicates per dataset
  int limit_draws = 100000;  // Monte Carlo size for limit calibration
  GammaLimitForm limit_form = GammaLimitForm::NonNegative;

  // Binomial / Poisson studies: chi-square-calibrated sets, coverage by
  // (truncated) enumeration over X — no Monte Carlo error. rate_grid holds p
  // or lambda; trials_n/m are trial counts (binomial, integral) or exposures.
  // One-sided rows recalibrate the set to 2*level-1 and take its endpoint.
  std::vector<double> rate_grid;
  double trials_n = 50.0;
  double trials_m = 50.0;
  bool corrected = false;

  // Within-sample design: Weibull(shape, 1) lifetimes censored at the p_f1
  // failure quantile, horizon at the p_f1+d quantile, n = round(E(r)/p_f1).
  // Coverage is the exact conditional Binom(n-r, (p_f2-p_f1)/(1-p_f1)) mass
  // on the interval, averaged over datasets; r=0 draws are redrawn and
  // counted in `discarded`. Rows are produced per variant on shared
  // datasets; sides other than two-sided do not apply.
  double ws_shape = 2.0;
  double ws_pf1 = 0.1;
  double ws_d = 0.1;
  std::vector<double> expected_events;
  std::vector<WithinSampleVariant> ws_variants{
      WithinSampleVariant::SurvivalAdjusted};

  std::vector<double> levels{0.95};  // confidence levels
  std::vector<Side> sides{Side::TwoSided};
  int N = 1000;  // Monte Carlo datasets per factor point (>= 100)
  std::uint64_t seed = 0;
};

struct CoverageRow {
  std::string method;  // "lr-bootstrap" ... ; within-sample appends /variant
  std::string side;
  double level = 0.95;
  std::string factor_name;
  double factor_value = 0.0;
  double coverage = 0.0;
  double se = 0.0;        // sqrt(c*(1-c)/n_effective); 0 for exact rows
  int n_effective = 0;    // datasets contributing; 0 for exact rows
  int discarded = 0;      // failed datasets / r=0 redraws
};

struct CoverageReport {
  std::vector<CoverageRow> rows;
  std::uint64_t seed = 0;
  int N = 0;
  int B = 0;
};

// Deterministic for a given config regardless of thread count: dataset i of
// experiment cell c reads the counter stream (seed, c*N+i) and writes into
// slot i; methods share each dataset, so comparisons are paired. Per-dataset
// failures are discarded, up to 2% of N, else the run errors out.
CoverageReport run_coverage(const CoverageConfig& config, int threads = 0);

// Single-threaded reference loop; bit-identical to run_coverage.
CoverageReport run_coverage_serial(const CoverageConfig& config);

}  // namespace lrpi
