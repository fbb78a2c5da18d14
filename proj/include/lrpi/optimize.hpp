#pragma once

#include <functional>
#include <vector>

namespace lrpi {

// All optimizers minimize; callers negate log-likelihoods.

struct Optimum1D {
  double x = 0.0;
  double f = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct OptimumND {
  std::vector<double> x;
  double f = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Golden-section minimization on [lo, hi]; xtol is absolute on x.
Optimum1D golden_section_min(const std::function<double(double)>& f, double lo,
                             double hi, double xtol, int max_iter = 200);

// Expands geometrically from seed until f rises on both sides (a bracketed
// interior minimum) or a limit is hit. step0 sets the first offset.
struct MinBracket {
  double lo = 0.0;
  double hi = 0.0;
  bool ok = false;
  int expansions = 0;
};
MinBracket expand_min_bracket(const std::function<double(double)>& f, double seed,
                              double step0, double lo_limit, double hi_limit,
                              int max_doublings = 60);

// Nelder-Mead with one automatic restart from the incumbent. step gives the
// initial simplex edge per coordinate.
OptimumND nelder_mead_min(const std::function<double(const std::vector<double>&)>& f,
                          const std::vector<double>& x0, const std::vector<double>& step,
                          double ftol = 1e-12, double xtol = 1e-10, int max_iter = 4000);

// Box-constrained BFGS with central-difference gradients and Armijo
// backtracking; convergence when the projected gradient sup-norm falls below
// grad_tol or the relative objective change below ftol.
OptimumND bfgs_box_min(const std::function<double(const std::vector<double>&)>& f,
                       const std::vector<double>& x0, const std::vector<double>& lo,
                       const std::vector<double>& hi, double grad_tol = 1e-8,
                       double ftol = 1e-10, int max_iter = 200);

// Bisection for f(x) = 0 on [lo, hi] with f(lo), f(hi) of opposite sign.
double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   double xtol, int max_iter = 200);

}  // namespace lrpi
