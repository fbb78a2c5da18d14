// lrpi: likelihood-ratio prediction from the shell.
//
//   fit       maximum-likelihood fit of a family, JSON out
//   predict   prediction interval / bound for one future observation or count
//   coverage  Monte Carlo coverage study driven by a JSON config
//
// Exit codes: 0 success, 2 usage error, 1 numeric/runtime failure. Failures
// print {"error":{"type":...,"message":...}} on stderr.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "lrpi/bounds.hpp"
#include "lrpi/calibrate.hpp"
#include "lrpi/discrete.hpp"
#include "lrpi/errors.hpp"
#include "lrpi/families.hpp"
#include "lrpi/lr_engine.hpp"
#include "lrpi/serialize.hpp"
#include "lrpi/simstudy.hpp"
#include "lrpi/within_sample.hpp"

namespace {

using nlohmann::ordered_json;

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Options {
  std::string family;
  std::string data_path;
  double level = 0.95;
  std::string side = "two-sided";
  std::string method;  // continuous predict: bootstrap|chisq|limit|plugin
  int B = 1000;
  int draws = 100000;
  std::string limit_form = "non-negative";
  int dof = 1;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int threads = 0;
  double sigma = kNan;
  std::string out;
  std::string curve_out;
  int curve_points = 401;
  // discrete
  double x = kNan;
  double n = kNan;
  double m = kNan;
  bool corrected = false;
  // within-sample
  double tc = kNan;
  double tw = kNan;
  std::string variant = "survival-adjusted";
  // coverage
  std::string config_path;
  std::string csv_out;
};

void emit(const std::string& text, const std::string& path) {
  std::string body = text;
  if (body.empty() || body.back() != '\n') body += '\n';
  if (path.empty())
    std::fputs(body.c_str(), stdout);
  else
    lrpi::write_text_file(path, body);
}

void emit_error(const std::string& type, const std::string& message) {
  std::fputs((lrpi::error_json(type, message) + "\n").c_str(), stderr);
}

lrpi::Side parse_side(const std::string& s) {
  if (s == "lower") return lrpi::Side::Lower;
  if (s == "upper") return lrpi::Side::Upper;
  if (s == "two-sided") return lrpi::Side::TwoSided;
  throw lrpi::UsageError("unknown side '" + s + "' (lower|upper|two-sided)");
}

lrpi::WithinSampleVariant parse_variant(const std::string& s) {
  if (s == "survival-adjusted") return lrpi::WithinSampleVariant::SurvivalAdjusted;
  if (s == "failures-only") return lrpi::WithinSampleVariant::FailuresOnly;
  throw lrpi::UsageError("unknown variant '" + s +
                         "' (survival-adjusted|failures-only)");
}

lrpi::FamilySpec make_spec(const Options& o) {
  const lrpi::FamilyId id = lrpi::family_from_name(o.family);
  if (id == lrpi::FamilyId::NormalKnownSigma) {
    if (!std::isfinite(o.sigma) || !(o.sigma > 0.0))
      throw lrpi::UsageError("family normal-known-sigma requires --sigma > 0");
    return lrpi::FamilySpec::make(id, o.sigma);
  }
  if (!std::isnan(o.sigma))
    throw lrpi::UsageError("--sigma applies only to family normal-known-sigma");
  return lrpi::FamilySpec::make(id);
}

void check_level(double level) {
  if (!(level > 0.0 && level < 1.0))
    throw lrpi::UsageError("--level must lie strictly between 0 and 1");
}

void require_seed(const Options& o, const char* what) {
  if (!o.seed_given)
    throw lrpi::UsageError(std::string(what) + " is randomized; --seed is required");
}

int as_int(double v, const char* flag) {
  if (!std::isfinite(v) || v != std::floor(v) || std::abs(v) > 1e9)
    throw lrpi::UsageError(std::string(flag) + " must be an integer");
  return static_cast<int>(v);
}

double require_value(double v, const char* flag) {
  if (std::isnan(v)) throw lrpi::UsageError(std::string(flag) + " is required");
  return v;
}

// One-sided bounds pair with an infinite partner endpoint; JSON renders the
// infinity as null.
lrpi::PredictionResult one_sided_result(const lrpi::LrContext& ctx, double zeta,
                                        lrpi::Side side, double level,
                                        lrpi::CalibrationMethod method) {
  lrpi::PredictionResult r;
  r.level = level;
  r.method = method;
  r.y0 = ctx.y0;
  if (side == lrpi::Side::Upper) {
    r.zeta_hi = zeta;
    r.upper = lrpi::one_sided_bound(ctx, zeta, lrpi::Side::Upper, level);
    r.lower = -kInf;
  } else {
    r.zeta_lo = zeta;
    r.lower = lrpi::one_sided_bound(ctx, zeta, lrpi::Side::Lower, level);
    r.upper = kInf;
    r.lower_at_boundary = std::isfinite(ctx.support.lo) && r.lower == ctx.support.lo;
  }
  return r;
}

// Plot-friendly grid: the interval padded by a quarter span, clamped inside
// the family support; one-sided/degenerate results fall back to a span
// around the curve mode.
void write_curve(const lrpi::LrContext& ctx, const lrpi::PredictionResult& r,
                 const std::string& path, int points) {
  if (points < 2) throw lrpi::UsageError("--curve-points must be at least 2");
  double lo = r.lower;
  double hi = r.upper;
  const bool flo = std::isfinite(lo);
  const bool fhi = std::isfinite(hi);
  double span = 0.0;
  if (flo && fhi)
    span = hi - lo;
  else if (flo)
    span = 2.0 * std::abs(ctx.y0 - lo);
  else if (fhi)
    span = 2.0 * std::abs(hi - ctx.y0);
  if (!(span > 0.0)) span = 1.0 + std::abs(ctx.y0);
  if (!flo) lo = ctx.y0 - span;
  if (!fhi) hi = ctx.y0 + span;
  lo -= 0.25 * span;
  hi += 0.25 * span;
  if (std::isfinite(ctx.support.lo))
    lo = std::max(lo, ctx.support.lo + 1e-6 * std::max(hi - ctx.support.lo, 1e-12));
  emit(lrpi::curve_csv(lrpi::lr_curve(ctx, lo, hi, points)), path);
}

int cmd_fit(const Options& o) {
  const lrpi::FamilySpec spec = make_spec(o);
  const std::vector<double> data = lrpi::read_data_file(o.data_path);
  emit(lrpi::to_json(lrpi::fit_ml(spec, data)), o.out);
  return 0;
}

int predict_continuous(const Options& o) {
  const lrpi::FamilySpec spec = make_spec(o);
  const std::vector<double> data = lrpi::read_data_file(o.data_path);
  const lrpi::Side side = parse_side(o.side);
  check_level(o.level);
  const double alpha = 1.0 - o.level;
  const std::string method = o.method.empty() ? "bootstrap" : o.method;

  lrpi::PredictionResult result;
  lrpi::LrContext ctx;
  bool have_ctx = false;

  if (method == "plugin") {
    result = lrpi::plug_in_interval(spec, data, o.level, side);
  } else {
    ctx = lrpi::prepare(spec, data);
    have_ctx = true;
    double lambda = kNan, zeta_lo = kNan, zeta_hi = kNan;
    lrpi::CalibrationMethod tag = lrpi::CalibrationMethod::Bootstrap;
    if (method == "bootstrap") {
      require_seed(o, "method bootstrap");
      lrpi::CalibrationSpec cs;
      cs.method = lrpi::CalibrationMethod::Bootstrap;
      cs.level = alpha;
      cs.B = o.B;
      cs.seed = o.seed;
      const lrpi::CalibrationResult cal = lrpi::bootstrap_calibrate(ctx, cs, o.threads);
      lambda = cal.lambda_hi;
      zeta_lo = cal.zeta_lo;
      zeta_hi = cal.zeta_hi;
    } else if (method == "chisq") {
      if (o.dof != 1 && o.dof != 2) throw lrpi::UsageError("--dof must be 1 or 2");
      lrpi::CalibrationSpec cs;
      cs.method = lrpi::CalibrationMethod::ChiSquare;
      cs.level = alpha;
      cs.dof = o.dof;
      const lrpi::CalibrationResult cal = lrpi::chisq_calibrate(cs);
      lambda = cal.lambda_hi;
      zeta_lo = cal.zeta_lo;
      zeta_hi = cal.zeta_hi;
      tag = lrpi::CalibrationMethod::ChiSquare;
    } else if (method == "limit") {
      require_seed(o, "method limit");
      lrpi::GammaLimitForm form;
      if (o.limit_form == "non-negative")
        form = lrpi::GammaLimitForm::NonNegative;
      else if (o.limit_form == "shifted-log")
        form = lrpi::GammaLimitForm::ShiftedLog;
      else
        throw lrpi::UsageError("unknown --limit-form '" + o.limit_form +
                               "' (non-negative|shifted-log)");
      const lrpi::LimitCalibration cal = lrpi::limit_calibrate(
          spec, ctx.data_fit, alpha, o.draws, o.seed, form, o.threads);
      lambda = cal.lambda_hi;
      zeta_lo = cal.zeta_lo;
      zeta_hi = cal.zeta_hi;
      tag = lrpi::CalibrationMethod::LimitPlugin;
    } else {
      throw lrpi::UsageError("unknown method '" + method +
                             "' (bootstrap|chisq|limit|plugin)");
    }
    if (side == lrpi::Side::TwoSided)
      result = lrpi::two_sided_interval(ctx, lambda, o.level, tag);
    else
      result = one_sided_result(ctx, side == lrpi::Side::Upper ? zeta_hi : zeta_lo,
                                side, o.level, tag);
  }

  if (!o.curve_out.empty()) {
    if (!have_ctx) ctx = lrpi::prepare(spec, data);
    write_curve(ctx, result, o.curve_out, o.curve_points);
  }
  emit(lrpi::to_json(result), o.out);
  return 0;
}

// One-sided discrete bounds are endpoints of the central set at confidence
// 2*level - 1, so each tail carries 1 - level.
double discrete_effective_level(lrpi::Side side, double level) {
  if (side == lrpi::Side::TwoSided) return level;
  if (!(level > 0.5))
    throw lrpi::UsageError("one-sided discrete bounds need --level > 0.5");
  return 2.0 * level - 1.0;
}

void check_discrete_method(const Options& o) {
  if (!o.method.empty() && o.method != "chisq")
    throw lrpi::UsageError("count prediction supports only --method chisq");
}

int predict_binomial(const Options& o) {
  check_discrete_method(o);
  check_level(o.level);
  const lrpi::Side side = parse_side(o.side);
  lrpi::BinomialSetup s;
  s.x = as_int(require_value(o.x, "--x"), "--x");
  s.n = as_int(require_value(o.n, "--n"), "--n");
  s.m = as_int(require_value(o.m, "--m"), "--m");
  const lrpi::IntegerInterval set =
      lrpi::discrete_prediction_set(s, discrete_effective_level(side, o.level),
                                    o.corrected);
  ordered_json j;
  j["family"] = "binomial";
  j["x"] = s.x;
  j["n"] = s.n;
  j["m"] = s.m;
  j["level"] = o.level;
  j["side"] = o.side;
  j["method"] = "chisq";
  j["corrected"] = o.corrected;
  j["lo"] = side == lrpi::Side::Upper ? 0 : set.lo;
  j["hi"] = side == lrpi::Side::Lower ? s.m : set.hi;
  j["below_nominal"] = set.below_nominal;
  emit(j.dump(2), o.out);
  return 0;
}

int predict_poisson(const Options& o) {
  check_discrete_method(o);
  check_level(o.level);
  const lrpi::Side side = parse_side(o.side);
  lrpi::PoissonSetup s;
  s.x = as_int(require_value(o.x, "--x"), "--x");
  s.n = require_value(o.n, "--n");
  s.m = require_value(o.m, "--m");
  const lrpi::IntegerInterval set =
      lrpi::discrete_prediction_set(s, discrete_effective_level(side, o.level),
                                    o.corrected);
  ordered_json j;
  j["family"] = "poisson";
  j["x"] = s.x;
  j["n"] = s.n;
  j["m"] = s.m;
  j["level"] = o.level;
  j["side"] = o.side;
  j["method"] = "chisq";
  j["corrected"] = o.corrected;
  j["lo"] = side == lrpi::Side::Upper ? 0 : set.lo;
  if (side == lrpi::Side::Lower)
    j["hi"] = nullptr;  // a Poisson count has no upper support edge
  else
    j["hi"] = set.hi;
  j["below_nominal"] = set.below_nominal;
  emit(j.dump(2), o.out);
  return 0;
}

int predict_within_sample(const Options& o) {
  check_discrete_method(o);
  check_level(o.level);
  const lrpi::Side side = parse_side(o.side);
  lrpi::CensoredSample sample = lrpi::read_censored_sample(o.data_path);
  if (!std::isnan(o.tc)) sample.t_c = o.tc;
  lrpi::WithinSampleQuery q;
  q.t_w = require_value(o.tw, "--tw");
  q.level = discrete_effective_level(side, o.level);
  q.variant = parse_variant(o.variant);
  const lrpi::IntegerInterval set = lrpi::within_sample_interval(sample, q);
  const int at_risk = sample.n - static_cast<int>(sample.failure_times.size());
  ordered_json j;
  j["family"] = "within-sample";
  j["n"] = sample.n;
  j["r"] = static_cast<int>(sample.failure_times.size());
  j["t_c"] = sample.t_c;
  j["t_w"] = q.t_w;
  j["variant"] = o.variant;
  j["level"] = o.level;
  j["side"] = o.side;
  j["method"] = "chisq";
  j["lo"] = side == lrpi::Side::Upper ? 0 : set.lo;
  j["hi"] = side == lrpi::Side::Lower ? at_risk : set.hi;
  j["below_nominal"] = set.below_nominal;
  emit(j.dump(2), o.out);
  return 0;
}

int cmd_predict(const Options& o) {
  if (o.family == "binomial") return predict_binomial(o);
  if (o.family == "poisson") return predict_poisson(o);
  if (o.family == "within-sample") return predict_within_sample(o);
  if (o.data_path.empty()) throw lrpi::UsageError("--data is required");
  return predict_continuous(o);
}

int cmd_coverage(const Options& o) {
  const std::string text = lrpi::read_text_file(o.config_path);
  lrpi::CoverageConfig cfg = lrpi::coverage_config_from_json(text);
  if (o.seed_given) cfg.seed = o.seed;
  if (cfg.kind == lrpi::CoverageConfig::Kind::Continuous ||
      cfg.kind == lrpi::CoverageConfig::Kind::WithinSample) {
    // Exact-enumeration kinds draw nothing; the sampled kinds must pin a seed.
    if (!o.seed_given && !nlohmann::json::parse(text).contains("seed"))
      throw lrpi::UsageError("this coverage study is randomized; set 'seed' in the "
                             "config or pass --seed");
  }
  const lrpi::CoverageReport report = lrpi::run_coverage(cfg, o.threads);
  emit(lrpi::to_json(report), o.out);
  if (!o.csv_out.empty()) lrpi::write_text_file(o.csv_out, lrpi::to_csv(report));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Likelihood-ratio prediction intervals, bounds, and coverage studies"};
  app.require_subcommand(1);

  CLI::App* fit = app.add_subcommand("fit", "Maximum-likelihood fit of a family");
  fit->add_option("--family", o.family,
                  "normal|normal-known-sigma|exponential|two-param-exponential|"
                  "uniform|gamma|weibull|gengamma")
      ->required();
  fit->add_option("--data", o.data_path, "single-column CSV or JSON array")->required();
  fit->add_option("--sigma", o.sigma, "known sigma (normal-known-sigma only)");
  fit->add_option("--out", o.out, "output path (stdout when absent)");

  CLI::App* predict =
      app.add_subcommand("predict", "Prediction interval or bound for one future draw");
  predict->add_option("--family", o.family,
                      "continuous family, or binomial|poisson|within-sample")
      ->required();
  predict->add_option("--data", o.data_path,
                      "single-column CSV or JSON array; within-sample: JSON envelope "
                      "{failure_times, n, t_c}");
  predict->add_option("--level", o.level, "confidence level (default 0.95)");
  predict->add_option("--side", o.side, "lower|upper|two-sided (default two-sided)");
  predict->add_option("--method", o.method,
                      "bootstrap|chisq|limit|plugin (default bootstrap)");
  predict->add_option("--B", o.B, "bootstrap replicates (default 1000)");
  predict->add_option("--draws", o.draws,
                      "Monte Carlo draws for --method limit (default 100000)");
  predict->add_option("--limit-form", o.limit_form,
                      "gamma limit variable form: non-negative|shifted-log");
  predict->add_option("--dof", o.dof, "chi-square degrees of freedom, 1 or 2");
  CLI::Option* predict_seed = predict->add_option("--seed", o.seed, "RNG seed");
  predict->add_option("--threads", o.threads,
                      "worker threads (0 = LRPI_THREADS or OpenMP default)");
  predict->add_option("--sigma", o.sigma, "known sigma (normal-known-sigma only)");
  predict->add_option("--x", o.x, "observed count");
  predict->add_option("--n", o.n, "observed trials (binomial) or exposure (poisson)");
  predict->add_option("--m", o.m, "future trials (binomial) or exposure (poisson)");
  predict->add_flag("--corrected", o.corrected,
                    "half-count correction at extreme counts");
  predict->add_option("--tc", o.tc, "censoring time (overrides the data envelope)");
  predict->add_option("--tw", o.tw, "prediction window end (within-sample)");
  predict->add_option("--variant", o.variant,
                      "within-sample full model: survival-adjusted|failures-only");
  predict->add_option("--out", o.out, "output path (stdout when absent)");
  predict->add_option("--curve-out", o.curve_out, "statistic-curve CSV path");
  predict->add_option("--curve-points", o.curve_points,
                      "grid size for --curve-out (default 401)");

  CLI::App* coverage =
      app.add_subcommand("coverage", "Monte Carlo coverage study from a JSON config");
  coverage->add_option("--config", o.config_path, "study config JSON")->required();
  CLI::Option* coverage_seed =
      coverage->add_option("--seed", o.seed, "override the config seed");
  coverage->add_option("--threads", o.threads,
                       "worker threads (0 = LRPI_THREADS or OpenMP default)");
  coverage->add_option("--out", o.out, "report JSON path (stdout when absent)");
  coverage->add_option("--csv", o.csv_out, "tidy per-row CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    emit_error("usage", e.what());
    return 2;
  }
  o.seed_given = predict_seed->count() > 0 || coverage_seed->count() > 0;

  try {
    if (fit->parsed()) return cmd_fit(o);
    if (predict->parsed()) return cmd_predict(o);
    return cmd_coverage(o);
  } catch (const lrpi::UsageError& e) {
    emit_error(e.kind(), e.what());
    return 2;
  } catch (const lrpi::Error& e) {
    emit_error(e.kind(), e.what());
    return 1;
  } catch (const std::exception& e) {
    emit_error("internal", e.what());
    return 1;
  }
}
