#include "lrpi/simstudy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "lrpi/errors.hpp"
#include "lrpi/parallel.hpp"
#include "lrpi/rng.hpp"
#include "lrpi/special.hpp"

namespace lrpi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

double xlogy(double x, double y) {
  return x == 0.0 ? 0.0 : x * std::log(y);
}

double log_binom_pmf(int k, int n, double p) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
         xlogy(k, p) + xlogy(n - k, 1.0 - p);
}

// Slot-indexed loop shared by the parallel entry point and its serial twin;
// `work` must not throw (datasets record their own failures).
void for_each_slot(int count, int threads, bool parallel,
                   const std::function<void(int)>& work) {
#ifdef _OPENMP
  if (parallel) {
    const int nt = resolve_threads(threads);
#pragma omp parallel for schedule(dynamic) num_threads(nt)
    for (int i = 0; i < count; ++i) work(i);
    return;
  }
#else
  (void)threads;
  (void)parallel;
#endif
  for (int i = 0; i < count; ++i) work(i);
}

void check_levels(const CoverageConfig& cfg) {
  if (cfg.levels.empty()) throw UsageError("coverage config lists no levels");
  for (const double level : cfg.levels)
    if (!(level > 0.0 && level < 1.0))
      throw UsageError("levels must lie in (0,1)");
  if (cfg.sides.empty()) throw UsageError("coverage config lists no sides");
}

void validate_config(const CoverageConfig& cfg) {
  if (cfg.N < 100) throw UsageError("coverage study needs N >= 100");
  check_levels(cfg);
  switch (cfg.kind) {
    case CoverageConfig::Kind::Continuous:
      if (cfg.points.empty()) throw UsageError("no factor points configured");
      if (cfg.methods.empty()) throw UsageError("no methods configured");
      for (const ContinuousPoint& pt : cfg.points) {
        if (pt.truth.family() != cfg.spec.id)
          throw UsageError("factor-point truth family does not match the study family");
        if (pt.n < min_fit_size(cfg.spec.id))
          throw UsageError("factor-point n below the family's minimum fit size");
      }
      break;
    case CoverageConfig::Kind::Binomial: {
      if (cfg.rate_grid.empty()) throw UsageError("no p values configured");
      for (const double p : cfg.rate_grid)
        if (!(p > 0.0 && p < 1.0)) throw UsageError("binomial p must lie in (0,1)");
      const double ni = std::round(cfg.trials_n), mi = std::round(cfg.trials_m);
      if (ni != cfg.trials_n || mi != cfg.trials_m || ni < 1 || mi < 1)
        throw UsageError("binomial trial counts must be integers >= 1");
      break;
    }
    case CoverageConfig::Kind::Poisson:
      if (cfg.rate_grid.empty()) throw UsageError("no lambda values configured");
      for (const double lam : cfg.rate_grid)
        if (!(lam > 0.0)) throw UsageError("poisson lambda must be positive");
      if (!(cfg.trials_n > 0.0) || !(cfg.trials_m > 0.0))
        throw UsageError("poisson exposures must be positive");
      break;
    case CoverageConfig::Kind::WithinSample:
      if (cfg.expected_events.empty())
        throw UsageError("no expected-event counts configured");
      for (const double er : cfg.expected_events)
        if (!(er > 0.0)) throw UsageError("expected events must be positive");
      if (!(cfg.ws_pf1 > 0.0 && cfg.ws_pf1 < 1.0) || !(cfg.ws_d > 0.0) ||
          !(cfg.ws_pf1 + cfg.ws_d < 1.0))
        throw UsageError("within-sample design needs 0 < p_f1 < p_f1+d < 1");
      if (!(cfg.ws_shape > 0.0)) throw UsageError("within-sample shape must be positive");
      if (cfg.ws_variants.empty()) throw UsageError("no within-sample variants configured");
      break;
  }
}

struct CellCounts {
  int failures = 0;
  std::string first_error;
};

CellCounts tally_failures(const CoverageConfig& cfg, const std::vector<uint8_t>& failed,
                          const std::vector<std::string>& errors) {
  CellCounts c;
  for (int i = 0; i < cfg.N; ++i) {
    if (!failed[i]) continue;
    if (c.failures == 0) c.first_error = errors[i];
    ++c.failures;
  }
  if (c.failures > 0.02 * cfg.N)
    throw CalibrationError("coverage study discarded " + std::to_string(c.failures) +
                           " of " + std::to_string(cfg.N) +
                           " datasets; first failure: " + c.first_error);
  return c;
}

double plug_in_quantile_check(const LrContext& ctx, const CoverageConfig& cfg,
                              double p) {
  return quantile(cfg.spec, ctx.data_fit.params, p);
}

void run_continuous(const CoverageConfig& cfg, int threads, bool parallel,
                    CoverageReport& rep) {
  const int M = static_cast<int>(cfg.methods.size());
  const int S = static_cast<int>(cfg.sides.size());
  std::uint64_t cell = 0;
  for (const ContinuousPoint& point : cfg.points) {
    for (const double level : cfg.levels) {
      const double alpha = 1.0 - level;
      CalibrationResult wilks;
      if (std::count(cfg.methods.begin(), cfg.methods.end(),
                     CoverageMethod::LrChiSquare) > 0) {
        CalibrationSpec cs;
        cs.method = CalibrationMethod::ChiSquare;
        cs.level = alpha;
        wilks = chisq_calibrate(cs);
      }
      std::vector<uint8_t> covered(static_cast<std::size_t>(cfg.N) * M * S, 0);
      std::vector<uint8_t> failed(cfg.N, 0);
      std::vector<std::string> errors(cfg.N);
      const std::uint64_t base = cell * static_cast<std::uint64_t>(cfg.N);

      const auto work = [&](int i) {
        try {
          Rng rng = Rng::stream(cfg.seed, base + i);
          std::vector<double> data(point.n);
          for (double& v : data) v = sample_one(cfg.spec, point.truth, rng);
          const double y = sample_one(cfg.spec, point.truth, rng);
          const std::uint64_t boot_seed = rng.next_u64();
          const std::uint64_t limit_seed = rng.next_u64();
          const LrContext ctx = prepare(cfg.spec, data);
          for (int mi = 0; mi < M; ++mi) {
            double lam = kNan, zlo = kNan, zhi = kNan;
            bool plug = false;
            switch (cfg.methods[mi]) {
              case CoverageMethod::LrBootstrap: {
                CalibrationSpec cs;
                cs.method = CalibrationMethod::Bootstrap;
                cs.level = alpha;
                cs.B = cfg.B;
                cs.seed = boot_seed;
                const CalibrationResult cr = bootstrap_calibrate_serial(ctx, cs);
                lam = cr.lambda_hi;
                zlo = cr.zeta_lo;
                zhi = cr.zeta_hi;
                break;
              }
              case CoverageMethod::LrChiSquare:
                lam = wilks.lambda_hi;
                zlo = wilks.zeta_lo;
                zhi = wilks.zeta_hi;
                break;
              case CoverageMethod::LrLimit: {
                const LimitCalibration lc = limit_calibrate_serial(
                    cfg.spec, ctx.data_fit, alpha, cfg.limit_draws, limit_seed,
                    cfg.limit_form);
                lam = lc.lambda_hi;
                zlo = lc.zeta_lo;
                zhi = lc.zeta_hi;
                break;
              }
              case CoverageMethod::PlugIn:
                plug = true;
                break;
            }
            for (int si = 0; si < S; ++si) {
              bool in = false;
              if (plug) {
                switch (cfg.sides[si]) {
                  case Side::TwoSided:
                    in = y >= plug_in_quantile_check(ctx, cfg, alpha / 2.0) &&
                         y <= plug_in_quantile_check(ctx, cfg, 1.0 - alpha / 2.0);
                    break;
                  case Side::Upper:
                    in = y <= plug_in_quantile_check(ctx, cfg, level);
                    break;
                  case Side::Lower:
                    in = y >= plug_in_quantile_check(ctx, cfg, 1.0 - level);
                    break;
                }
              } else {
                switch (cfg.sides[si]) {
                  case Side::TwoSided:
                    in = two_sided_covers(ctx, y, lam);
                    break;
                  case Side::Upper:
                    in = upper_covers(ctx, y, zhi);
                    break;
                  case Side::Lower:
                    in = lower_covers(ctx, y, zlo);
                    break;
                }
              }
              covered[(static_cast<std::size_t>(i) * M + mi) * S + si] =
                  in ? 1 : 0;
            }
          }
        } catch (const std::exception& e) {
          failed[i] = 1;
          errors[i] = e.what();
        }
      };
      for_each_slot(cfg.N, threads, parallel, work);

      const CellCounts counts = tally_failures(cfg, failed, errors);
      const int n_eff = cfg.N - counts.failures;
      for (int mi = 0; mi < M; ++mi) {
        for (int si = 0; si < S; ++si) {
          int hits = 0;
          for (int i = 0; i < cfg.N; ++i)
            if (!failed[i] &&
                covered[(static_cast<std::size_t>(i) * M + mi) * S + si])
              ++hits;
          CoverageRow row;
          row.method = to_string(cfg.methods[mi]);
          row.side = to_string(cfg.sides[si]);
          row.level = level;
          row.factor_name = point.factor_name;
          row.factor_value = point.factor_value;
          row.coverage = n_eff > 0 ? static_cast<double>(hits) / n_eff : kNan;
          row.se = n_eff > 0
                       ? std::sqrt(row.coverage * (1.0 - row.coverage) / n_eff)
                       : kNan;
          row.n_effective = n_eff;
          row.discarded = counts.failures;
          rep.rows.push_back(std::move(row));
        }
      }
      ++cell;
    }
  }
}

// One-sided discrete rows recalibrate the two-sided set to 2*level-1 and use
// its endpoint; this requires level > 1/2.
double discrete_effective_level(Side side, double level) {
  if (side == Side::TwoSided) return level;
  if (!(level > 0.5))
    throw UsageError("one-sided discrete bounds need level > 0.5");
  return 2.0 * level - 1.0;
}

void run_binomial(const CoverageConfig& cfg, CoverageReport& rep) {
  const int n = static_cast<int>(cfg.trials_n);
  const int m = static_cast<int>(cfg.trials_m);
  const std::string method = cfg.corrected ? "lr-chisq-corrected" : "lr-chisq";
  for (const double p : cfg.rate_grid) {
    std::vector<double> pmf_x(n + 1), cdf_y(m + 2, 0.0);
    for (int x = 0; x <= n; ++x) pmf_x[x] = std::exp(log_binom_pmf(x, n, p));
    for (int y = 0; y <= m; ++y)
      cdf_y[y + 1] = cdf_y[y] + std::exp(log_binom_pmf(y, m, p));
    // mass of Y on lo..hi
    const auto mass = [&](int lo, int hi) { return cdf_y[hi + 1] - cdf_y[lo]; };
    for (const double level : cfg.levels) {
      for (const Side side : cfg.sides) {
        const double eff = discrete_effective_level(side, level);
        double coverage = 0.0;
        for (int x = 0; x <= n; ++x) {
          const IntegerInterval set =
              discrete_prediction_set(BinomialSetup{x, n, m}, eff, cfg.corrected);
          double part = 0.0;
          switch (side) {
            case Side::TwoSided: part = mass(set.lo, set.hi); break;
            case Side::Upper: part = mass(0, set.hi); break;
            case Side::Lower: part = mass(set.lo, m); break;
          }
          coverage += pmf_x[x] * part;
        }
        rep.rows.push_back({method, to_string(side), level, "p", p, coverage,
                            0.0, 0, 0});
      }
    }
  }
}

void run_poisson(const CoverageConfig& cfg, CoverageReport& rep) {
  const std::string method = cfg.corrected ? "lr-chisq-corrected" : "lr-chisq";
  for (const double lam : cfg.rate_grid) {
    const double mu_x = cfg.trials_n * lam;
    const double mu_y = cfg.trials_m * lam;
    // X weights truncated once the accumulated mass reaches 1 - 1e-12.
    std::vector<double> pmf_x;
    double cum = 0.0;
    for (int x = 0; cum < 1.0 - 1e-12; ++x) {
      pmf_x.push_back(std::exp(-mu_x + xlogy(x, mu_x) - std::lgamma(x + 1.0)));
      cum += pmf_x.back();
      if (x > 10000000) throw FitError("poisson enumeration failed to converge");
    }
    // P(Y <= k) = gammaQ(k+1, mu); regularized upper incomplete gamma.
    const auto cdf_y = [&](int k) {
      return k < 0 ? 0.0 : gamma_q(k + 1.0, mu_y);
    };
    for (const double level : cfg.levels) {
      for (const Side side : cfg.sides) {
        const double eff = discrete_effective_level(side, level);
        double coverage = 0.0;
        for (int x = 0; x < static_cast<int>(pmf_x.size()); ++x) {
          const IntegerInterval set = discrete_prediction_set(
              PoissonSetup{x, cfg.trials_n, cfg.trials_m}, eff, cfg.corrected);
          double part = 0.0;
          switch (side) {
            case Side::TwoSided: part = cdf_y(set.hi) - cdf_y(set.lo - 1); break;
            case Side::Upper: part = cdf_y(set.hi); break;
            case Side::Lower: part = 1.0 - cdf_y(set.lo - 1); break;
          }
          coverage += pmf_x[x] * part;
        }
        rep.rows.push_back({method, to_string(side), level, "lambda", lam,
                            coverage, 0.0, 0, 0});
      }
    }
  }
}

std::string variant_name(WithinSampleVariant v) {
  return v == WithinSampleVariant::SurvivalAdjusted ? "survival-adjusted"
                                                    : "failures-only";
}

void run_within_sample(const CoverageConfig& cfg, int threads, bool parallel,
                       CoverageReport& rep) {
  const FamilySpec wspec = FamilySpec::make(FamilyId::Weibull);
  const ParamVector truth = ParamVector::weibull(cfg.ws_shape, 1.0);
  const double p_f2 = cfg.ws_pf1 + cfg.ws_d;
  const double t_c = std::pow(-std::log1p(-cfg.ws_pf1), 1.0 / cfg.ws_shape);
  const double t_w = std::pow(-std::log1p(-p_f2), 1.0 / cfg.ws_shape);
  const double p_cond = cfg.ws_d / (1.0 - cfg.ws_pf1);
  const int V = static_cast<int>(cfg.ws_variants.size());

  std::uint64_t cell = 0;
  for (const double er : cfg.expected_events) {
    const int n = static_cast<int>(std::llround(er / cfg.ws_pf1));
    if (n < 1) throw UsageError("within-sample design yields n < 1");
    for (const double level : cfg.levels) {
      std::vector<double> cond(static_cast<std::size_t>(cfg.N) * V, kNan);
      std::vector<uint8_t> failed(cfg.N, 0);
      std::vector<int> redraws(cfg.N, 0);
      std::vector<std::string> errors(cfg.N);
      const std::uint64_t base = cell * static_cast<std::uint64_t>(cfg.N);

      const auto work = [&](int i) {
        try {
          Rng rng = Rng::stream(cfg.seed, base + i);
          std::vector<double> fails;
          for (;;) {
            fails.clear();
            for (int k = 0; k < n; ++k) {
              const double t = sample_one(wspec, truth, rng);
              if (t <= t_c) fails.push_back(t);
            }
            if (!fails.empty()) break;
            if (++redraws[i] >= 1000)
              throw FitError("no failures observed after 1000 redraws");
          }
          std::sort(fails.begin(), fails.end());
          const CensoredSample sample{fails, n, t_c};
          const int at_risk = n - static_cast<int>(fails.size());
          for (int vi = 0; vi < V; ++vi) {
            const IntegerInterval set = within_sample_interval(
                sample, WithinSampleQuery{t_w, level, cfg.ws_variants[vi]});
            // Exact conditional coverage: Binom(n-r, p_cond) mass on the set.
            double v = 0.0;
            for (int y = set.lo; y <= set.hi; ++y)
              v += std::exp(log_binom_pmf(y, at_risk, p_cond));
            cond[static_cast<std::size_t>(i) * V + vi] = v;
          }
        } catch (const std::exception& e) {
          failed[i] = 1;
          errors[i] = e.what();
        }
      };
      for_each_slot(cfg.N, threads, parallel, work);

      const CellCounts counts = tally_failures(cfg, failed, errors);
      const int n_eff = cfg.N - counts.failures;
      int total_redraws = 0;
      for (int i = 0; i < cfg.N; ++i) total_redraws += redraws[i];
      for (int vi = 0; vi < V; ++vi) {
        double sum = 0.0;
        for (int i = 0; i < cfg.N; ++i)
          if (!failed[i]) sum += cond[static_cast<std::size_t>(i) * V + vi];
        CoverageRow row;
        row.method = "lr-chisq/" + variant_name(cfg.ws_variants[vi]);
        row.side = to_string(Side::TwoSided);
        row.level = level;
        row.factor_name = "expected_events";
        row.factor_value = er;
        row.coverage = n_eff > 0 ? sum / n_eff : kNan;
        row.se = n_eff > 0
                     ? std::sqrt(row.coverage * (1.0 - row.coverage) / n_eff)
                     : kNan;
        row.n_effective = n_eff;
        row.discarded = counts.failures + total_redraws;
        rep.rows.push_back(std::move(row));
      }
      ++cell;
    }
  }
}

CoverageReport run_impl(const CoverageConfig& cfg, int threads, bool parallel) {
  validate_config(cfg);
  CoverageReport rep;
  rep.seed = cfg.seed;
  rep.N = cfg.N;
  rep.B = cfg.B;
  switch (cfg.kind) {
    case CoverageConfig::Kind::Continuous:
      run_continuous(cfg, threads, parallel, rep);
      break;
    case CoverageConfig::Kind::Binomial:
      run_binomial(cfg, rep);
      break;
    case CoverageConfig::Kind::Poisson:
      run_poisson(cfg, rep);
      break;
    case CoverageConfig::Kind::WithinSample:
      run_within_sample(cfg, threads, parallel, rep);
      break;
  }
  return rep;
}

}  // namespace

std::string to_string(CoverageMethod method) {
  switch (method) {
    case CoverageMethod::LrBootstrap: return "lr-bootstrap";
    case CoverageMethod::LrChiSquare: return "lr-chisq";
    case CoverageMethod::LrLimit: return "lr-limit";
    case CoverageMethod::PlugIn: return "plug-in";
  }
  return "unknown";
}

std::string to_string(Side side) {
  switch (side) {
    case Side::Lower: return "lower";
    case Side::Upper: return "upper";
    case Side::TwoSided: return "two-sided";
  }
  return "unknown";
}

PredictionResult plug_in_interval(const FamilySpec& spec,
                                  const std::vector<double>& data, double level,
                                  Side side) {
  if (!(level > 0.0 && level < 1.0)) throw UsageError("level must lie in (0,1)");
  const FittedModel fit = fit_ml(spec, data);
  const double alpha = 1.0 - level;
  PredictionResult out;
  out.level = level;
  out.method = CalibrationMethod::PlugIn;
  out.y0 = quantile(spec, fit.params, 0.5);
  switch (side) {
    case Side::TwoSided:
      out.lower = quantile(spec, fit.params, alpha / 2.0);
      out.upper = quantile(spec, fit.params, 1.0 - alpha / 2.0);
      break;
    case Side::Upper:
      out.lower = -kInf;
      out.upper = quantile(spec, fit.params, level);
      break;
    case Side::Lower:
      out.lower = quantile(spec, fit.params, 1.0 - level);
      out.upper = kInf;
      break;
  }
  return out;
}

CoverageReport run_coverage(const CoverageConfig& config, int threads) {
  return run_impl(config, threads, true);
}

CoverageReport run_coverage_serial(const CoverageConfig& config) {
  return run_impl(config, 0, false);
}

}  // namespace lrpi
