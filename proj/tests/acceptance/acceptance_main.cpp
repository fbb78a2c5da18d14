// Acceptance gate: one line per criterion, [PASS]/[FAIL], nonzero exit on any
// failure. Every tolerance is fixed here, next to the check it guards; seeds
// are constants so reruns are bit-identical. The property battery (criterion
// 11) runs before any simulation so its verdict cannot depend on them.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include "lrpi/bounds.hpp"
#include "lrpi/calibrate.hpp"
#include "lrpi/discrete.hpp"
#include "lrpi/errors.hpp"
#include "lrpi/families.hpp"
#include "lrpi/lr_engine.hpp"
#include "lrpi/rng.hpp"
#include "lrpi/simstudy.hpp"

namespace {

using namespace lrpi;

std::string fmt(const char* f, ...) {
  char buf[1024];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

struct Verdict {
  bool pass = false;
  std::string text;
};

const std::vector<double> kRealData = {-1.32, 0.04, 0.87, -0.55, 1.94,
                                       0.31,  -2.10, 1.02, 0.66, -0.28};
const std::vector<double> kPositiveData = {0.62, 1.49, 2.21, 0.93, 3.08,
                                           1.17, 0.45, 2.76, 1.88, 1.02};

// --- criterion 1: normal small-sample bootstrap interval hits nominal ------

Verdict criterion1() {
  CoverageConfig cfg;
  cfg.kind = CoverageConfig::Kind::Continuous;
  cfg.spec = FamilySpec::make(FamilyId::Normal);
  cfg.points = {{ParamVector::normal(0.0, 1.0), 10, "n", 10.0}};
  cfg.methods = {CoverageMethod::LrBootstrap};
  cfg.B = 1000;
  cfg.levels = {0.95};
  cfg.sides = {Side::TwoSided};
  cfg.N = 2000;
  cfg.seed = 7101;
  const CoverageRow row = run_coverage(cfg).rows.at(0);
  const bool ok = std::fabs(row.coverage - 0.95) <= 0.015;
  return {ok, fmt("normal n=10, 95%% two-sided bootstrap interval: coverage "
                  "%.4f, target 0.950 +/- 0.015 (N=2000, B=1000, %d discarded)",
                  row.coverage, row.discarded)};
}

// --- criterion 2: closed-form statistics equal the generic optimizer -------

Verdict criterion2() {
  struct Case {
    FamilyId id;
    bool real_line;
  };
  const Case cases[] = {{FamilyId::Normal, true},
                        {FamilyId::NormalKnownSigma, true},
                        {FamilyId::Exponential, false},
                        {FamilyId::TwoParamExponential, true},
                        {FamilyId::UniformZeroTheta, false}};
  double worst = 0.0;
  int total = 0;
  for (const Case& c : cases) {
    Rng rng = Rng::stream(7202, static_cast<std::uint64_t>(c.id));
    for (int rep = 0; rep < 200; ++rep) {
      const int n = 3 + static_cast<int>(rng.next_u64() % 28);
      ParamVector truth;
      double sigma = std::numeric_limits<double>::quiet_NaN();
      switch (c.id) {
        case FamilyId::Normal:
          truth = ParamVector::normal(rng.uniform(-2.0, 2.0), rng.uniform(0.5, 3.0));
          break;
        case FamilyId::NormalKnownSigma:
          sigma = rng.uniform(0.5, 3.0);
          truth = ParamVector::normal_known_sigma(rng.uniform(-2.0, 2.0));
          break;
        case FamilyId::Exponential:
          truth = ParamVector::exponential(rng.uniform(0.5, 3.5));
          break;
        case FamilyId::TwoParamExponential:
          truth = ParamVector::two_param_exponential(rng.uniform(-2.0, 2.0),
                                                     rng.uniform(0.5, 2.5));
          break;
        default:
          truth = ParamVector::uniform(rng.uniform(0.5, 3.5));
          break;
      }
      const FamilySpec spec = FamilySpec::make(c.id, sigma);
      std::vector<double> data(static_cast<std::size_t>(n));
      for (double& v : data) v = sample_one(spec, truth, rng);
      const double y = sample_one(spec, truth, rng);
      const LrContext ctx = prepare(spec, data);
      worst = std::max(worst,
                       std::fabs(neg2_log_lr(ctx, y) - neg2_log_lr_generic(ctx, y)));
      ++total;
    }
  }
  const bool ok = worst <= 1e-6;
  return {ok, fmt("closed-form statistic vs generic optimizer on %d random "
                  "datasets (5 families, n in 3..30): max |diff| %.3g <= 1e-06",
                  total, worst)};
}

// --- criterion 3: pivotal invariance + bootstrap threshold stability -------

Verdict criterion3() {
  const double a = 2.75, b = -1.3;
  double worst = 0.0;
  const auto drift = [&](FamilyId id, const std::vector<double>& data,
                         const std::vector<double>& ys, bool affine,
                         double sigma = std::numeric_limits<double>::quiet_NaN()) {
    const double shift = affine ? b : 0.0;
    std::vector<double> scaled(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) scaled[i] = a * data[i] + shift;
    const LrContext base = prepare(FamilySpec::make(id, sigma), data);
    const LrContext moved = prepare(
        FamilySpec::make(id, std::isnan(sigma) ? sigma : a * sigma), scaled);
    for (double y : ys) {
      const double d =
          std::fabs(neg2_log_lr(base, y) - neg2_log_lr(moved, a * y + shift));
      worst = std::max(worst, d);
    }
  };
  const std::vector<double> real_ys = {-2.5, -0.8, 0.3, 1.7, 3.1};
  const std::vector<double> pos_ys = {0.3, 0.8, 1.5, 2.4, 3.3};
  drift(FamilyId::Normal, kRealData, real_ys, true);
  drift(FamilyId::NormalKnownSigma, kRealData, real_ys, true, 1.4);
  drift(FamilyId::TwoParamExponential, kPositiveData, pos_ys, true);
  drift(FamilyId::Exponential, kPositiveData, pos_ys, false);
  drift(FamilyId::UniformZeroTheta, kPositiveData, pos_ys, false);
  drift(FamilyId::Gamma, kPositiveData, pos_ys, false);
  drift(FamilyId::Weibull, kPositiveData, pos_ys, false);
  const bool invariance_ok = worst <= 1e-10;

  // Same-law check: the bootstrap threshold estimates from two datasets whose
  // fitted parameters differ must agree up to Monte Carlo error (the replicate
  // law is parameter-free for these families). 8 batches of 500 per dataset.
  double worst_ratio = 0.0;
  const auto batches = [](const LrContext& ctx, std::uint64_t seed0,
                          double& mean, double& se) {
    std::vector<double> q;
    for (int k = 0; k < 8; ++k) {
      CalibrationSpec cs;
      cs.method = CalibrationMethod::Bootstrap;
      cs.level = 0.05;
      cs.B = 500;
      cs.seed = seed0 + static_cast<std::uint64_t>(k);
      q.push_back(bootstrap_calibrate(ctx, cs).lambda_hi);
    }
    mean = 0.0;
    for (double v : q) mean += v;
    mean /= static_cast<double>(q.size());
    double ss = 0.0;
    for (double v : q) ss += (v - mean) * (v - mean);
    se = std::sqrt(ss / (q.size() - 1.0) / static_cast<double>(q.size()));
  };
  const auto stable = [&](FamilyId id, const std::vector<double>& data,
                          bool affine, std::uint64_t seed0) {
    std::vector<double> scaled(data.size());
    for (std::size_t i = 0; i < data.size(); ++i)
      scaled[i] = a * data[i] + (affine ? b : 0.0);
    double m1, s1, m2, s2;
    batches(prepare(FamilySpec::make(id), data), seed0, m1, s1);
    batches(prepare(FamilySpec::make(id), scaled), seed0 + 100, m2, s2);
    worst_ratio = std::max(
        worst_ratio, std::fabs(m1 - m2) / std::sqrt(s1 * s1 + s2 * s2));
  };
  stable(FamilyId::Normal, kRealData, true, 7303);
  stable(FamilyId::Exponential, kPositiveData, false, 7353);
  const bool stable_ok = worst_ratio <= 4.0;

  return {invariance_ok && stable_ok,
          fmt("affine/scale invariance of the statistic: max drift %.3g <= "
              "1e-10; bootstrap threshold shift across rescaled fits: %.2f "
              "batch SEs <= 4",
              worst, worst_ratio)};
}

// --- criterion 4: uniform statistic approaches its two-term limit law ------

Verdict criterion4() {
  const FamilySpec spec = FamilySpec::make(FamilyId::UniformZeroTheta);
  const int sims = 5000, n = 200;
  std::vector<double> stats(sims);
  for (int i = 0; i < sims; ++i) {
    Rng rng = Rng::stream(7404, static_cast<std::uint64_t>(i));
    std::vector<double> data(n);
    for (double& v : data) v = rng.uniform01();
    const double y = rng.uniform01();
    stats[static_cast<std::size_t>(i)] = neg2_log_lr(prepare(spec, data), y);
  }
  std::sort(stats.begin(), stats.end());
  double ks = 0.0;
  for (int i = 0; i < sims; ++i) {
    const double f = 1.0 - std::exp(-0.5 * stats[static_cast<std::size_t>(i)]);
    ks = std::max(ks, std::max(f - i / double(sims), (i + 1) / double(sims) - f));
  }
  const bool ok = ks < 0.03;
  return {ok, fmt("uniform n=200 statistic vs chi-square(2) over 5000 draws: "
                  "KS distance %.4f < 0.03",
                  ks)};
}

// --- criterion 5: gamma upper bound near nominal at n=4 and n=50 -----------

Verdict criterion5() {
  CoverageConfig cfg;
  cfg.kind = CoverageConfig::Kind::Continuous;
  cfg.spec = FamilySpec::make(FamilyId::Gamma);
  cfg.points = {{ParamVector::gamma(1.0, 1.0), 4, "n", 4.0},
                {ParamVector::gamma(1.0, 1.0), 50, "n", 50.0}};
  cfg.methods = {CoverageMethod::LrBootstrap};
  cfg.B = 2000;
  cfg.levels = {0.95};
  cfg.sides = {Side::Upper};
  cfg.N = 2000;
  cfg.seed = 7505;
  const CoverageReport rep = run_coverage(cfg);
  const CoverageRow& r4 = rep.rows.at(0);
  const CoverageRow& r50 = rep.rows.at(1);
  const double tol4 = 0.02 + 3.0 * r4.se;
  const bool ok =
      std::fabs(r4.coverage - 0.95) < tol4 && std::fabs(r50.coverage - 0.95) <= 0.015;
  return {ok, fmt("gamma shape 1, 95%% upper bootstrap bound: n=4 coverage "
                  "%.4f (tol %.4f), n=50 coverage %.4f (tol 0.015); N=2000, "
                  "B=2000",
                  r4.coverage, tol4, r50.coverage)};
}

// --- criterion 6: gamma limit-distribution plug-in calibration -------------

Verdict criterion6() {
  CoverageConfig cfg;
  cfg.kind = CoverageConfig::Kind::Continuous;
  cfg.spec = FamilySpec::make(FamilyId::Gamma);
  cfg.points = {{ParamVector::gamma(2.0, 1.0), 100, "n", 100.0}};
  cfg.methods = {CoverageMethod::LrLimit};
  cfg.limit_draws = 100000;
  cfg.levels = {0.95};
  cfg.sides = {Side::Upper};
  cfg.N = 1000;
  cfg.seed = 7606;
  const CoverageRow row = run_coverage(cfg).rows.at(0);
  const bool ok = std::fabs(row.coverage - 0.95) <= 0.02;
  return {ok, fmt("gamma n=100, 95%% upper limit-calibrated bound: coverage "
                  "%.4f, target 0.950 +/- 0.020 (N=1000, 100000 draws)",
                  row.coverage)};
}

// --- criterion 7: binomial exact coverage + half-count correction ----------

Verdict criterion7() {
  CoverageConfig cfg;
  cfg.kind = CoverageConfig::Kind::Binomial;
  cfg.rate_grid = {0.1, 0.3, 0.5};
  cfg.trials_n = 50.0;
  cfg.trials_m = 50.0;
  cfg.corrected = false;
  cfg.levels = {0.95};
  cfg.sides = {Side::TwoSided};
  const CoverageReport rep = run_coverage(cfg);
  bool band_ok = true;
  for (const CoverageRow& row : rep.rows)
    band_ok = band_ok && row.coverage >= 0.93 && row.coverage <= 0.99;

  CoverageConfig small = cfg;
  small.rate_grid = {0.05};
  small.trials_n = 15.0;
  small.trials_m = 15.0;
  const double plain = run_coverage(small).rows.at(0).coverage;
  small.corrected = true;
  const double corrected = run_coverage(small).rows.at(0).coverage;
  const bool corr_ok = std::fabs(corrected - 0.95) <= std::fabs(plain - 0.95);

  return {band_ok && corr_ok,
          fmt("binomial n=m=50 exact two-sided coverage %.4f/%.4f/%.4f at "
              "p=0.1/0.3/0.5 all in [0.93, 0.99]; n=m=15 p=0.05 corrected "
              "%.4f vs plain %.4f (corrected at least as close to 0.95)",
              rep.rows.at(0).coverage, rep.rows.at(1).coverage,
              rep.rows.at(2).coverage, corrected, plain)};
}

// --- criterion 8: poisson corrected sets, truncated enumeration ------------

Verdict criterion8() {
  CoverageConfig cfg;
  cfg.kind = CoverageConfig::Kind::Poisson;
  cfg.rate_grid = {1.0, 4.0, 8.0};
  cfg.trials_n = 4.0;
  cfg.trials_m = 4.0;
  cfg.corrected = true;
  cfg.levels = {0.95};
  cfg.sides = {Side::TwoSided};
  const CoverageReport rep = run_coverage(cfg);
  bool ok = true;
  for (const CoverageRow& row : rep.rows)
    ok = ok && row.coverage >= 0.92 && row.coverage <= 0.995;
  return {ok, fmt("poisson exposures 4/4, corrected 95%% sets: exact coverage "
                  "%.4f/%.4f/%.4f at rates 1/4/8, all in [0.92, 0.995]",
                  rep.rows.at(0).coverage, rep.rows.at(1).coverage,
                  rep.rows.at(2).coverage)};
}

// --- criterion 9: censored weibull within-sample interval ------------------

Verdict criterion9() {
  CoverageConfig cfg;
  cfg.kind = CoverageConfig::Kind::WithinSample;
  cfg.ws_shape = 2.0;
  cfg.ws_pf1 = 0.1;
  cfg.ws_d = 0.1;
  cfg.expected_events = {15.0};
  cfg.ws_variants = {WithinSampleVariant::SurvivalAdjusted,
                     WithinSampleVariant::FailuresOnly};
  cfg.levels = {0.95};
  cfg.N = 1000;
  cfg.seed = 7909;
  const CoverageReport rep = run_coverage(cfg);
  const CoverageRow& sa = rep.rows.at(0);
  const CoverageRow& fo = rep.rows.at(1);
  const bool ok = sa.coverage >= 0.92 && sa.coverage <= 0.975;
  return {ok, fmt("within-sample weibull (shape 2, E(r)=15, n=150): "
                  "survival-adjusted conditional coverage %.4f in [0.92, "
                  "0.975]; failures-only %.4f alongside (N=1000)",
                  sa.coverage, fo.coverage)};
}

// --- criterion 10: generalized gamma, LR bound dominates plug-in -----------

Verdict criterion10() {
  std::string detail;
  bool ok = true;
  for (double lambda : {1.0, 2.0}) {
    CoverageConfig cfg;
    cfg.kind = CoverageConfig::Kind::Continuous;
    cfg.spec = FamilySpec::make(FamilyId::GeneralizedGamma);
    cfg.points = {{ParamVector::gen_gamma(0.0, 1.0, lambda), 30, "lambda", lambda}};
    cfg.methods = {CoverageMethod::LrBootstrap, CoverageMethod::PlugIn};
    cfg.B = 500;
    cfg.levels = {0.95};
    cfg.sides = {Side::Upper};
    cfg.N = 500;
    cfg.seed = 8010 + static_cast<std::uint64_t>(lambda);
    const CoverageReport rep = run_coverage(cfg);
    const CoverageRow& lr = rep.rows.at(0);
    const CoverageRow& plug = rep.rows.at(1);
    const bool under = plug.coverage < 0.95 - 2.0 * plug.se;
    const bool ordered = lr.coverage >= plug.coverage;
    ok = ok && under && ordered;
    detail += fmt("%slambda=%g: plug-in %.4f (< %.4f), lr %.4f",
                  detail.empty() ? "" : "; ", lambda, plug.coverage,
                  0.95 - 2.0 * plug.se, lr.coverage);
  }
  return {ok, fmt("generalized gamma n=30, 95%% upper bound: plug-in "
                  "undercovers and LR does not fall below it (%s; N=500, B=500)",
                  detail.c_str())};
}

// --- criterion 11: property battery, no simulation involved ----------------

Verdict criterion11() {
  bool ok = true;
  std::string why;
  const auto require = [&](bool cond, const char* label) {
    if (!cond && why.empty()) why = label;
    ok = ok && cond;
  };

  // Signed statistic is nondecreasing in y across four families.
  const struct {
    FamilyId id;
    const std::vector<double>* data;
    double lo, hi;
  } mono[] = {{FamilyId::Gamma, &kPositiveData, 0.05, 8.0},
              {FamilyId::Weibull, &kPositiveData, 0.05, 8.0},
              {FamilyId::Exponential, &kPositiveData, 0.05, 8.0},
              {FamilyId::Normal, &kRealData, -6.0, 6.0}};
  for (const auto& m : mono) {
    const LrContext ctx = prepare(FamilySpec::make(m.id), *m.data);
    double prev = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 80; ++i) {
      const double y = m.lo + (m.hi - m.lo) * i / 80.0;
      const double z = signed_lr(ctx, y);
      require(z >= prev - 1e-9, "signed statistic not monotone");
      prev = z;
    }
  }

  // Intervals nest as the threshold grows, and endpoints solve the equation.
  for (FamilyId id : {FamilyId::Gamma, FamilyId::Normal, FamilyId::Weibull,
                      FamilyId::Exponential}) {
    const std::vector<double>& data =
        id == FamilyId::Normal ? kRealData : kPositiveData;
    const LrContext ctx = prepare(FamilySpec::make(id), data);
    const PredictionResult narrow = two_sided_interval(ctx, 1.0, 0.68);
    const PredictionResult mid = two_sided_interval(ctx, 3.8415, 0.95);
    const PredictionResult wide = two_sided_interval(ctx, 6.0, 0.985);
    require(wide.lower <= mid.lower && mid.lower <= narrow.lower &&
                narrow.upper <= mid.upper && mid.upper <= wide.upper,
            "intervals do not nest");
    require(std::fabs(neg2_log_lr(ctx, mid.lower) - 3.8415) <= 1e-6 &&
                std::fabs(neg2_log_lr(ctx, mid.upper) - 3.8415) <= 1e-6,
            "endpoint residual above 1e-6");
  }

  // Quantile helper is deterministic and uses the ceil(np) order statistic;
  // counter-seeded streams replay exactly.
  std::vector<double> sample = {5.0, 1.0, 4.0, 2.0, 3.0};
  require(empirical_quantile(sample, 0.5) == 3.0 &&
              empirical_quantile(sample, 0.5) == 3.0 &&
              empirical_quantile(sample, 1.0) == 5.0,
          "quantile helper not deterministic");
  Rng r1 = Rng::stream(1234, 7), r2 = Rng::stream(1234, 7);
  bool replay = true;
  for (int i = 0; i < 5; ++i) replay = replay && r1.next_u64() == r2.next_u64();
  require(replay, "rng stream does not replay");

  // Zero-count conventions: matched extremes give exactly zero, mixed
  // extremes stay finite and nonnegative.
  require(binomial_neg2_log_lr({0, 5, 7}, 0, false) == 0.0 &&
              binomial_neg2_log_lr({5, 5, 3}, 3, false) == 0.0,
          "matched binomial extremes not exactly zero");
  require(poisson_neg2_log_lr({0, 2.0, 3.0}, 0, false) == 0.0,
          "matched poisson extremes not exactly zero");
  bool finite = true;
  for (int x = 0; x <= 5 && finite; ++x)
    for (int y = 0; y <= 7 && finite; ++y) {
      const double v = binomial_neg2_log_lr({x, 5, 7}, y, false);
      finite = std::isfinite(v) && v >= 0.0;
    }
  require(finite, "binomial statistic not finite over the full grid");

  return {ok, ok ? std::string("property battery (signed monotonicity, interval "
                               "nesting, endpoint residuals, quantile "
                               "determinism, zero-count conventions): all pass")
                 : "property battery failed: " + why};
}

}  // namespace

int main() {
  using Clock = std::chrono::steady_clock;
  Verdict results[11];
  // Battery first: its verdict must not depend on any simulation having run.
  double battery_seconds = 0.0;
  {
    const auto t0 = Clock::now();
    try {
      results[10] = criterion11();
    } catch (const std::exception& e) {
      results[10] = {false, std::string("unexpected error: ") + e.what()};
    }
    battery_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  }

  Verdict (*const sims[])() = {criterion1, criterion2, criterion3, criterion4,
                               criterion5, criterion6, criterion7, criterion8,
                               criterion9, criterion10};
  bool all = true;
  for (int k = 0; k < 11; ++k) {
    double seconds = battery_seconds;
    if (k < 10) {
      const auto t0 = Clock::now();
      try {
        results[k] = sims[k]();
      } catch (const std::exception& e) {
        results[k] = {false, std::string("unexpected error: ") + e.what()};
      }
      seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    }
    all = all && results[k].pass;
    std::printf("[%s] criterion %d: %s [%.1fs]\n",
                results[k].pass ? "PASS" : "FAIL", k + 1,
                results[k].text.c_str(), seconds);
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
