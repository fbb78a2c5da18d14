#include "lrpi/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "lrpi/errors.hpp"

namespace lrpi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxExpansions = 60;
constexpr int kMaxBisect = 200;
constexpr int kScanPoints = 4096;

double char_scale(const LrContext& ctx) {
  if (ctx.spec.id == FamilyId::NormalKnownSigma) return ctx.spec.known_sigma;
  const double spread =
      ctx.n > 1 ? std::sqrt(ctx.sum_sq_dev / (ctx.n - 1)) : std::abs(ctx.mean);
  return std::max({spread, 0.05 * std::abs(ctx.y0), 1e-8});
}

struct Probe {
  double y = 0.0;
  int expansions = 0;
  bool at_boundary = false;
};

// Walks left from the mode until the curve reaches target. On bounded support
// the walk halves the gap to the edge and reports the boundary if the curve
// tops out below target there.
Probe expand_left(const LrContext& ctx, double target,
                  const std::function<double(double)>& f) {
  Probe p;
  if (ctx.support.lo == -kInf) {
    double h = char_scale(ctx);
    for (int k = 0; k < kMaxExpansions; ++k) {
      p.y = ctx.y0 - h;
      p.expansions = k + 1;
      if (f(p.y) >= target) return p;
      h *= 2.0;
    }
    throw BracketError("curve stayed below the threshold left of the mode");
  }
  double a = ctx.y0;
  for (int k = 0; k < kMaxExpansions; ++k) {
    a = ctx.support.lo + (a - ctx.support.lo) / 2.0;
    p.y = a;
    p.expansions = k + 1;
    if (f(a) >= target) return p;
  }
  p.y = ctx.support.lo;
  p.at_boundary = true;
  return p;
}

Probe expand_right(const LrContext& ctx, double target,
                   const std::function<double(double)>& f) {
  Probe p;
  double h = char_scale(ctx);
  for (int k = 0; k < kMaxExpansions; ++k) {
    p.y = ctx.y0 + h;
    p.expansions = k + 1;
    if (f(p.y) >= target) return p;
    h *= 2.0;
  }
  throw BracketError("curve stayed below the threshold right of the mode");
}

struct Root {
  double y = 0.0;
  int iterations = 0;
};

// g changes sign on [lo, hi]; returns the midpoint at tolerance
// 1e-9 * (1 + |y0|) on y.
Root bisect_counted(const LrContext& ctx, const std::function<double(double)>& g,
                    double lo, double hi) {
  const double xtol = 1e-9 * (1.0 + std::abs(ctx.y0));
  double glo = g(lo);
  Root r;
  for (int it = 0; it < kMaxBisect; ++it) {
    const double mid = 0.5 * (lo + hi);
    r.iterations = it + 1;
    const double gm = g(mid);
    if ((glo <= 0.0) == (gm <= 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
    if (hi - lo < xtol) break;
  }
  r.y = 0.5 * (lo + hi);
  return r;
}

PredictionResult scan_fallback(const LrContext& ctx, double threshold, double level,
                               CalibrationMethod method) {
  const auto f = [&ctx](double y) { return neg2_log_lr(ctx, y); };
  PredictionResult out;
  out.level = level;
  out.method = method;
  out.y0 = ctx.y0;
  out.lambda = threshold;
  out.multimodal = true;

  const Probe left = expand_left(ctx, threshold, f);
  const Probe right = expand_right(ctx, threshold, f);
  out.bracket_expansions = left.expansions + right.expansions;

  const double lo = left.y, hi = right.y;
  std::vector<double> ys(kScanPoints), vs(kScanPoints);
  for (int i = 0; i < kScanPoints; ++i) {
    ys[i] = lo + (hi - lo) * i / (kScanPoints - 1);
    vs[i] = f(ys[i]);
  }
  // Refine each pass/fail flip by bisection between the flanking grid points.
  const auto crossing = [&](int i) {
    const auto g = [&](double y) { return f(y) - threshold; };
    const Root r = bisect_counted(ctx, g, ys[i], ys[i + 1]);
    out.iterations += r.iterations;
    return r.y;
  };
  bool in_run = false;
  double run_start = 0.0;
  for (int i = 0; i < kScanPoints; ++i) {
    const bool pass = vs[i] <= threshold;
    if (pass && !in_run) {
      run_start = (i == 0) ? (left.at_boundary ? ctx.support.lo : ys[0]) : crossing(i - 1);
      in_run = true;
    } else if (!pass && in_run) {
      out.components.emplace_back(run_start, crossing(i - 1));
      in_run = false;
    }
  }
  if (in_run) out.components.emplace_back(run_start, ys[kScanPoints - 1]);
  if (out.components.empty()) {
    out.lower = out.upper = ctx.y0;
    return out;
  }
  out.lower = out.components.front().first;
  out.upper = out.components.back().second;
  out.lower_at_boundary = left.at_boundary && out.lower == ctx.support.lo;
  return out;
}

}  // namespace

PredictionResult two_sided_interval(const LrContext& ctx, double threshold, double level,
                                    CalibrationMethod method) {
  if (!(threshold >= 0.0)) throw UsageError("two-sided threshold must be >= 0");
  if (!(level > 0.0 && level < 1.0)) throw UsageError("level must lie in (0,1)");
  if (ctx.multimodal_warning) return scan_fallback(ctx, threshold, level, method);

  PredictionResult out;
  out.level = level;
  out.method = method;
  out.y0 = ctx.y0;
  out.lambda = threshold;
  if (threshold == 0.0) {
    out.lower = out.upper = ctx.y0;
    return out;
  }

  const auto f = [&ctx](double y) { return neg2_log_lr(ctx, y); };
  const auto g = [&](double y) { return f(y) - threshold; };

  const Probe left = expand_left(ctx, threshold, f);
  out.bracket_expansions += left.expansions;
  if (left.at_boundary) {
    out.lower = ctx.support.lo;
    out.lower_at_boundary = true;
  } else {
    const Root r = bisect_counted(ctx, g, left.y, ctx.y0);
    out.lower = r.y;
    out.iterations += r.iterations;
  }

  const Probe right = expand_right(ctx, threshold, f);
  out.bracket_expansions += right.expansions;
  const Root r = bisect_counted(ctx, g, ctx.y0, right.y);
  out.upper = r.y;
  out.iterations += r.iterations;
  return out;
}

double one_sided_bound(const LrContext& ctx, double zeta_threshold, Side side,
                       double level) {
  if (!(level > 0.0 && level < 1.0)) throw UsageError("level must lie in (0,1)");
  if (side == Side::TwoSided)
    throw UsageError("one_sided_bound takes side lower or upper");
  if (!std::isfinite(zeta_threshold)) throw UsageError("threshold must be finite");
  if (zeta_threshold == 0.0) return ctx.y0;

  const auto f = [&ctx](double y) { return neg2_log_lr(ctx, y); };
  const auto g = [&](double y) { return signed_lr(ctx, y) - zeta_threshold; };

  // zeta is nondecreasing: the root lies right of the mode for positive
  // thresholds and left of it otherwise, independent of side.
  if (zeta_threshold > 0.0) {
    const Probe right = expand_right(ctx, zeta_threshold, f);
    return bisect_counted(ctx, g, ctx.y0, right.y).y;
  }
  const Probe left = expand_left(ctx, -zeta_threshold, f);
  if (left.at_boundary) return ctx.support.lo;
  return bisect_counted(ctx, g, left.y, ctx.y0).y;
}

PredictionResult equal_tail_interval(const LrContext& ctx, double zeta_lo,
                                     double zeta_hi, double level,
                                     CalibrationMethod method) {
  PredictionResult out;
  out.level = level;
  out.method = method;
  out.y0 = ctx.y0;
  out.zeta_lo = zeta_lo;
  out.zeta_hi = zeta_hi;
  out.lower = one_sided_bound(ctx, zeta_lo, Side::Lower, level);
  out.upper = one_sided_bound(ctx, zeta_hi, Side::Upper, level);
  out.lower_at_boundary = out.lower == ctx.support.lo && ctx.support.lo > -kInf;
  return out;
}

bool two_sided_covers(const LrContext& ctx, double y, double lambda) {
  return neg2_log_lr(ctx, y) <= lambda;
}

bool upper_covers(const LrContext& ctx, double y, double zeta_hi) {
  return signed_lr(ctx, y) <= zeta_hi;
}

bool lower_covers(const LrContext& ctx, double y, double zeta_lo) {
  return signed_lr(ctx, y) >= zeta_lo;
}

}  // namespace lrpi
