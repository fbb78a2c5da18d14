#include "lrpi/discrete.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "lrpi/errors.hpp"
#include "lrpi/special.hpp"

namespace lrpi {

namespace {

double xlogy(double x, double y) {
  return x == 0.0 ? 0.0 : x * std::log(y);
}

void check_binomial(const BinomialSetup& s) {
  if (s.n < 1 || s.m < 1) throw UsageError("binomial trial counts must be >= 1");
  if (s.x < 0 || s.x > s.n) throw UsageError("binomial x must lie in 0..n");
}

void check_poisson(const PoissonSetup& s) {
  if (s.x < 0) throw UsageError("poisson x must be >= 0");
  if (!(s.n > 0.0) || !(s.m > 0.0))
    throw UsageError("poisson exposures must be positive");
}

void check_level(double level) {
  if (!(level > 0.0 && level < 1.0)) throw UsageError("level must lie in (0,1)");
}

// Contiguous passing set around a known integer minimizer; vals covers the
// full scan range 0..size-1.
IntegerInterval expand_around(const std::vector<double>& vals, int argmin,
                              double threshold) {
  if (vals[argmin] > threshold) return {argmin, argmin, true};
  int lo = argmin;
  while (lo > 0 && vals[lo - 1] <= threshold) --lo;
  int hi = argmin;
  const int top = static_cast<int>(vals.size()) - 1;
  while (hi < top && vals[hi + 1] <= threshold) ++hi;
  return {lo, hi, false};
}

}  // namespace

double binomial_neg2_log_lr(const BinomialSetup& setup, int y, bool corrected) {
  check_binomial(setup);
  if (y < 0 || y > setup.m) throw UsageError("binomial y must lie in 0..m");
  double x = setup.x, yy = y;
  if (corrected) {
    if (setup.x == 0) x += 0.5;
    if (setup.x == setup.n) x -= 0.5;
    if (y == 0) yy += 0.5;
    if (y == setup.m) yy -= 0.5;
  }
  const double n = setup.n, m = setup.m;
  const double px = x / n, py = yy / m, pp = (x + yy) / (n + m);
  const double sep = xlogy(x, px) + xlogy(n - x, 1.0 - px) + xlogy(yy, py) +
                     xlogy(m - yy, 1.0 - py);
  const double pooled = xlogy(x + yy, pp) + xlogy(n + m - x - yy, 1.0 - pp);
  return std::max(2.0 * (sep - pooled), 0.0);
}

double poisson_neg2_log_lr(const PoissonSetup& setup, int y, bool corrected) {
  check_poisson(setup);
  if (y < 0) throw UsageError("poisson y must be >= 0");
  double x = setup.x, yy = y;
  if (corrected) {
    if (setup.x == 0) x += 0.5;
    if (y == 0) yy += 0.5;
  }
  const double lp = (x + yy) / (setup.n + setup.m);
  const double sep = xlogy(x, x / setup.n) + xlogy(yy, yy / setup.m);
  const double pooled = xlogy(x + yy, lp);
  return std::max(2.0 * (sep - pooled), 0.0);
}

IntegerInterval discrete_prediction_set(const BinomialSetup& setup, double level,
                                        bool corrected) {
  check_binomial(setup);
  check_level(level);
  const double threshold = chisq_quantile(1, level);
  std::vector<double> vals(setup.m + 1);
  int argmin = 0;
  for (int y = 0; y <= setup.m; ++y) {
    vals[y] = binomial_neg2_log_lr(setup, y, corrected);
    if (vals[y] < vals[argmin]) argmin = y;
  }
  return expand_around(vals, argmin, threshold);
}

IntegerInterval discrete_prediction_set(const PoissonSetup& setup, double level,
                                        bool corrected) {
  check_poisson(setup);
  check_level(level);
  const double threshold = chisq_quantile(1, level);
  const auto stat = [&](int y) { return poisson_neg2_log_lr(setup, y, corrected); };

  // Walk from the scaled rate estimate to the integer minimizer; the curve is
  // unimodal in y.
  int argmin = static_cast<int>(std::llround(setup.m * setup.x / setup.n));
  if (argmin < 0) argmin = 0;
  double best = stat(argmin);
  while (argmin > 0) {
    const double v = stat(argmin - 1);
    if (!(v < best)) break;
    --argmin;
    best = v;
  }
  for (;;) {
    const double v = stat(argmin + 1);
    if (!(v < best)) break;
    ++argmin;
    best = v;
  }
  if (best > threshold) return {argmin, argmin, true};

  int lo = argmin;
  while (lo > 0 && stat(lo - 1) <= threshold) --lo;
  // The statistic grows without bound in y, so three consecutive failures
  // terminate the upward scan.
  int hi = argmin;
  int consecutive_fails = 0;
  for (int y = argmin + 1; consecutive_fails < 3; ++y) {
    if (stat(y) <= threshold) {
      hi = y;
      consecutive_fails = 0;
    } else {
      ++consecutive_fails;
    }
    if (y > argmin + 100000000)
      throw FitError("poisson prediction-set scan failed to terminate");
  }
  return {lo, hi, false};
}

}  // namespace lrpi
