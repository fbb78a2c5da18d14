#include "lrpi/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lrpi/errors.hpp"

namespace lrpi {

Optimum1D golden_section_min(const std::function<double(double)>& f, double lo,
                             double hi, double xtol, int max_iter) {
  if (!(lo < hi)) throw ParamDomainError("golden_section_min: lo < hi required");
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(d);
  Optimum1D out;
  for (out.iterations = 0; out.iterations < max_iter; ++out.iterations) {
    if (b - a < xtol) {
      out.converged = true;
      break;
    }
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  if (fc <= fd) {
    out.x = c;
    out.f = fc;
  } else {
    out.x = d;
    out.f = fd;
  }
  return out;
}

MinBracket expand_min_bracket(const std::function<double(double)>& f, double seed,
                              double step0, double lo_limit, double hi_limit,
                              int max_doublings) {
  MinBracket br;
  const double fs = f(seed);
  double lo = seed, hi = seed;
  double flo = fs, fhi = fs;
  double step = step0;
  // Walk each side out until the function value exceeds the seed value;
  // that wall plus the seed brackets a minimum.
  for (int k = 0; k < max_doublings && flo <= fs; ++k) {
    lo = std::max(lo_limit, seed - step);
    flo = f(lo);
    ++br.expansions;
    if (lo == lo_limit) break;
    step *= 2.0;
  }
  step = step0;
  for (int k = 0; k < max_doublings && fhi <= fs; ++k) {
    hi = std::min(hi_limit, seed + step);
    fhi = f(hi);
    ++br.expansions;
    if (hi == hi_limit) break;
    step *= 2.0;
  }
  br.lo = lo;
  br.hi = hi;
  br.ok = lo < seed || hi > seed;
  return br;
}

namespace {

OptimumND nelder_mead_once(const std::function<double(const std::vector<double>&)>& f,
                           const std::vector<double>& x0, const std::vector<double>& step,
                           double ftol, double xtol, int max_iter) {
  const std::size_t n = x0.size();
  std::vector<std::vector<double>> pts(n + 1, x0);
  std::vector<double> fv(n + 1);
  for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += step[i];
  for (std::size_t i = 0; i <= n; ++i) fv[i] = f(pts[i]);

  std::vector<std::size_t> order(n + 1);
  OptimumND out;
  for (out.iterations = 0; out.iterations < max_iter; ++out.iterations) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    const std::size_t best = order[0], worst = order[n], second = order[n - 1];

    double diam = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      diam = std::max(diam, std::abs(pts[worst][i] - pts[best][i]));
    if (std::abs(fv[worst] - fv[best]) <= ftol * (1.0 + std::abs(fv[best])) &&
        diam <= xtol) {
      out.converged = true;
      break;
    }

    std::vector<double> centroid(n, 0.0);
    for (std::size_t j = 0; j <= n; ++j) {
      if (j == worst) continue;
      for (std::size_t i = 0; i < n; ++i) centroid[i] += pts[j][i] / n;
    }
    auto blend = [&](double t) {
      std::vector<double> p(n);
      for (std::size_t i = 0; i < n; ++i)
        p[i] = centroid[i] + t * (pts[worst][i] - centroid[i]);
      return p;
    };

    std::vector<double> xr = blend(-1.0);
    const double fr = f(xr);
    if (fr < fv[best]) {
      std::vector<double> xe = blend(-2.0);
      const double fe = f(xe);
      if (fe < fr) {
        pts[worst] = std::move(xe);
        fv[worst] = fe;
      } else {
        pts[worst] = std::move(xr);
        fv[worst] = fr;
      }
    } else if (fr < fv[second]) {
      pts[worst] = std::move(xr);
      fv[worst] = fr;
    } else {
      const bool outside = fr < fv[worst];
      std::vector<double> xc = blend(outside ? -0.5 : 0.5);
      const double fc = f(xc);
      if (fc < std::min(fr, fv[worst])) {
        pts[worst] = std::move(xc);
        fv[worst] = fc;
      } else {
        for (std::size_t j = 0; j <= n; ++j) {
          if (j == best) continue;
          for (std::size_t i = 0; i < n; ++i)
            pts[j][i] = pts[best][i] + 0.5 * (pts[j][i] - pts[best][i]);
          fv[j] = f(pts[j]);
        }
      }
    }
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i <= n; ++i)
    if (fv[i] < fv[best]) best = i;
  out.x = pts[best];
  out.f = fv[best];
  return out;
}

}  // namespace

OptimumND nelder_mead_min(const std::function<double(const std::vector<double>&)>& f,
                          const std::vector<double>& x0, const std::vector<double>& step,
                          double ftol, double xtol, int max_iter) {
  OptimumND first = nelder_mead_once(f, x0, step, ftol, xtol, max_iter);
  // Restart with a shrunken simplex; guards against premature collapse.
  std::vector<double> step2(step.size());
  for (std::size_t i = 0; i < step.size(); ++i) step2[i] = 0.1 * step[i];
  OptimumND second = nelder_mead_once(f, first.x, step2, ftol, xtol, max_iter);
  second.iterations += first.iterations;
  second.converged = second.converged && first.converged;
  if (first.f < second.f) {
    second.x = first.x;
    second.f = first.f;
  }
  return second;
}

namespace {

std::vector<double> clamp_box(std::vector<double> x, const std::vector<double>& lo,
                              const std::vector<double>& hi) {
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
  return x;
}

std::vector<double> central_gradient(const std::function<double(const std::vector<double>&)>& f,
                                     const std::vector<double>& x,
                                     const std::vector<double>& lo,
                                     const std::vector<double>& hi) {
  const std::size_t n = x.size();
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double h = 1e-6 * (1.0 + std::abs(x[i]));
    std::vector<double> xp = x, xm = x;
    xp[i] = std::min(hi[i], x[i] + h);
    xm[i] = std::max(lo[i], x[i] - h);
    const double denom = xp[i] - xm[i];
    g[i] = denom > 0.0 ? (f(xp) - f(xm)) / denom : 0.0;
  }
  return g;
}

}  // namespace

OptimumND bfgs_box_min(const std::function<double(const std::vector<double>&)>& f,
                       const std::vector<double>& x0, const std::vector<double>& lo,
                       const std::vector<double>& hi, double grad_tol, double ftol,
                       int max_iter) {
  const std::size_t n = x0.size();
  std::vector<double> x = clamp_box(x0, lo, hi);
  double fx = f(x);
  std::vector<double> g = central_gradient(f, x, lo, hi);
  // Inverse-Hessian estimate, dense row-major.
  std::vector<double> H(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) H[i * n + i] = 1.0;

  OptimumND out;
  for (out.iterations = 0; out.iterations < max_iter; ++out.iterations) {
    // Projected gradient: components pushing out of an active bound do not count.
    double pg = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double gi = g[i];
      if (x[i] <= lo[i] && gi > 0.0) gi = 0.0;
      if (x[i] >= hi[i] && gi < 0.0) gi = 0.0;
      pg = std::max(pg, std::abs(gi));
    }
    if (pg < grad_tol) {
      out.converged = true;
      break;
    }

    std::vector<double> p(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) p[i] -= H[i * n + j] * g[j];
    double slope = 0.0;
    for (std::size_t i = 0; i < n; ++i) slope += p[i] * g[i];
    if (!(slope < 0.0)) {
      // Lost curvature; reset to steepest descent.
      std::fill(H.begin(), H.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        H[i * n + i] = 1.0;
        p[i] = -g[i];
      }
      slope = 0.0;
      for (std::size_t i = 0; i < n; ++i) slope += p[i] * g[i];
      if (!(slope < 0.0)) break;
    }

    double t = 1.0;
    std::vector<double> xn;
    double fn = fx;
    bool accepted = false;
    for (int ls = 0; ls < 50; ++ls) {
      std::vector<double> cand(n);
      for (std::size_t i = 0; i < n; ++i) cand[i] = x[i] + t * p[i];
      cand = clamp_box(std::move(cand), lo, hi);
      const double fc = f(cand);
      if (fc <= fx + 1e-4 * t * slope || fc < fx) {
        xn = std::move(cand);
        fn = fc;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;

    const std::vector<double> gn = central_gradient(f, xn, lo, hi);
    std::vector<double> s(n), yv(n);
    double sy = 0.0, ss = 0.0, yy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = xn[i] - x[i];
      yv[i] = gn[i] - g[i];
      sy += s[i] * yv[i];
      ss += s[i] * s[i];
      yy += yv[i] * yv[i];
    }
    const bool f_stalled = std::abs(fx - fn) <= ftol * (1.0 + std::abs(fn));
    x = std::move(xn);
    fx = fn;
    g = gn;
    if (f_stalled) {
      out.converged = true;
      ++out.iterations;
      break;
    }
    if (sy > 1e-12 * std::sqrt(ss * yy)) {
      // BFGS inverse update: H <- (I - s y'/sy) H (I - y s'/sy) + s s'/sy.
      std::vector<double> Hy(n, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) Hy[i] += H[i * n + j] * yv[j];
      double yHy = 0.0;
      for (std::size_t i = 0; i < n; ++i) yHy += yv[i] * Hy[i];
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          H[i * n + j] += ((sy + yHy) * s[i] * s[j]) / (sy * sy) -
                          (Hy[i] * s[j] + s[i] * Hy[j]) / sy;
    }
  }
  out.x = std::move(x);
  out.f = fx;
  return out;
}

double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   double xtol, int max_iter) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0))
    throw BracketError("bisect_root: endpoints do not straddle zero");
  for (int i = 0; i < max_iter && hi - lo > xtol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace lrpi
