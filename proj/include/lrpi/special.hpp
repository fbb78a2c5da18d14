#pragma once

// Scalar special functions used by the fitting and calibration code.
// All functions are pure and thread-safe; arguments outside the stated
// domains throw ParamDomainError.

namespace lrpi {

// digamma(x) for x > 0. Upward recurrence to x >= 10, then the asymptotic
// expansion in 1/x^2; absolute error below 1e-12 over (0, 1e8].
double digamma(double x);

// trigamma(x) for x > 0, same recurrence + asymptotic scheme.
double trigamma(double x);

// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
// Series for x < a + 1, continued fraction otherwise; ~1e-14 relative.
double gamma_p(double a, double x);

// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double gamma_q(double a, double x);

// Inverse of P(a, .): returns x with P(a, x) = p. Wilson-Hilferty start,
// Halley refinement; p in [0, 1) (p=0 -> 0).
double gamma_p_inv(double a, double p);

// Standard normal cdf via erfc; full double range.
double normal_cdf(double z);

// Standard normal quantile, p in (0, 1). Rational approximation with one
// Newton polish step; absolute error < 1e-13.
double normal_quantile(double p);

// Chi-square quantile for dof >= 1, p in (0, 1); abs error < 1e-10.
double chisq_quantile(int dof, double p);

}  // namespace lrpi
