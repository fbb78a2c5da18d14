#pragma once

namespace lrpi {

// x successes observed in n trials; the predictand is the count in m future
// trials from the same process.
struct BinomialSetup {
  int x = 0;
  int n = 1;
  int m = 1;
};

// x events at exposure n; the predictand carries exposure m. Exposures are
// positive reals (rate multipliers), counts stay integer.
struct PoissonSetup {
  int x = 0;
  double n = 1.0;
  double m = 1.0;
};

// Contiguous integer prediction set {lo, ..., hi}. below_nominal marks the
// argmin-singleton fallback taken when no integer clears the threshold.
struct IntegerInterval {
  int lo = 0;
  int hi = 0;
  bool below_nominal = false;
};

// -2 log of (pooled-rate likelihood / separate-rate likelihood) for the pair
// (x, y), with 0*log 0 = 0. corrected applies the half-count adjustment at
// the extreme outcomes: x'=x+0.5*I(x=0)-0.5*I(x=n) and the same for y
// (binomial); x'=x+0.5*I(x=0), y'=y+0.5*I(y=0) (Poisson).
double binomial_neg2_log_lr(const BinomialSetup& setup, int y, bool corrected);
double poisson_neg2_log_lr(const PoissonSetup& setup, int y, bool corrected);

// Integer y passing the chi-square(1) threshold at confidence `level`,
// contiguous around the integer minimizer; ties at the threshold included.
// Binomial scans all of 0..m; Poisson expands from round(m*x/n) downward to 0
// and upward until three consecutive y fail.
IntegerInterval discrete_prediction_set(const BinomialSetup& setup, double level,
                                        bool corrected);
IntegerInterval discrete_prediction_set(const PoissonSetup& setup, double level,
                                        bool corrected);

}  // namespace lrpi
