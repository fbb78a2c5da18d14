#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "lrpi/rng.hpp"

namespace lrpi {

enum class FamilyId {
  Normal,
  NormalKnownSigma,
  Exponential,          // mean parameterization
  TwoParamExponential,  // location mu, scale beta
  UniformZeroTheta,     // support (0, theta]
  Gamma,                // shape alpha, scale beta
  Weibull,              // shape beta, scale eta
  GeneralizedGamma,     // log-location mu, log-scale sigma, shape lambda
};

std::string_view family_name(FamilyId id);
FamilyId family_from_name(std::string_view name);  // throws UsageError

// Identifies the family, its fixed hyperparameters, and which parameter
// component is freed for the predictand's own model. Only the default varied
// component per family is supported; naming any other is an error.
struct FamilySpec {
  FamilyId id = FamilyId::Normal;
  double known_sigma = std::numeric_limits<double>::quiet_NaN();
  std::string varied_param;  // empty means the default below

  static FamilySpec make(FamilyId id,
                         double known_sigma = std::numeric_limits<double>::quiet_NaN(),
                         std::string varied = {});
  std::string_view default_varied() const;
};

// Fixed-size named parameter vector; slot meaning depends on the family:
//   Normal (mu, sigma) | NormalKnownSigma (mu) | Exponential (theta)
//   TwoParamExponential (mu, beta) | UniformZeroTheta (theta)
//   Gamma (alpha, beta) | Weibull (beta, eta) | GeneralizedGamma (mu, sigma, lambda)
// Factories validate positivity constraints and finiteness.
class ParamVector {
 public:
  ParamVector() = default;

  static ParamVector normal(double mu, double sigma);
  static ParamVector normal_known_sigma(double mu);
  static ParamVector exponential(double theta);
  static ParamVector two_param_exponential(double mu, double beta);
  static ParamVector uniform(double theta);
  static ParamVector gamma(double alpha, double beta);
  static ParamVector weibull(double beta, double eta);
  static ParamVector gen_gamma(double mu, double sigma, double lambda);

  // Build from named values, e.g. parsed JSON. Throws on wrong names or
  // constraint violations.
  static ParamVector from_named(FamilyId id,
                                const std::vector<std::pair<std::string, double>>& kv);

  FamilyId family() const { return id_; }
  int size() const { return size_; }
  double at(int i) const { return v_[i]; }
  std::vector<std::pair<std::string, double>> named() const;

 private:
  ParamVector(FamilyId id, double a, double b, double c, int size)
      : id_(id), v_{a, b, c}, size_(size) {}
  FamilyId id_ = FamilyId::Normal;
  double v_[3] = {0, 0, 0};
  int size_ = 0;
};

struct FittedModel {
  FamilySpec spec;
  ParamVector params;
  double log_likelihood = 0.0;
  bool converged = false;
  int iterations = 0;
};

// Support interval for data and for the predictand under the enlarged model.
struct Support {
  double lo;
  double hi;
};
Support family_support(FamilyId id);

// Minimum sample size for fit_ml: 1 one-parameter, 2 two-parameter, 3 GG.
int min_fit_size(FamilyId id);

// Throws SupportError if any value falls outside the family support.
void validate_data(const FamilySpec& spec, const std::vector<double>& data);

double log_density(const FamilySpec& spec, const ParamVector& params, double x);
double cdf(const FamilySpec& spec, const ParamVector& params, double x);
double quantile(const FamilySpec& spec, const ParamVector& params, double p);
double log_likelihood(const FamilySpec& spec, const ParamVector& params,
                      const std::vector<double>& data);

double sample_one(const FamilySpec& spec, const ParamVector& params, Rng& rng);
std::vector<double> sample(const FamilySpec& spec, const ParamVector& params,
                           std::size_t count, std::uint64_t seed);

// Complete-data maximum likelihood. Closed forms where they exist, Newton on
// the profile equation for Gamma/Weibull, bounded BFGS multistart for GG.
FittedModel fit_ml(const FamilySpec& spec, const std::vector<double>& data);

// Same contract, but numeric families start from init (bootstrap replicates
// warm-start at the parent fit and fall back to the cold ladder on failure).
FittedModel fit_ml_warm(const FamilySpec& spec, const std::vector<double>& data,
                        const ParamVector& init);

// Type-I-censored Weibull fit: r = times.size() failures at the given times,
// n - r survivors censored at t_c.
FittedModel fit_ml_type1_censored(const std::vector<double>& times, int n, double t_c);

// Censored-data Weibull log-likelihood (density factors + survivor factor).
double censored_log_likelihood(const ParamVector& weibull_params,
                               const std::vector<double>& times, int n, double t_c);

// sup over the varied component of f(y; varied, common): the y-profile of the
// full model. The varied slot of `common` is ignored.
double single_obs_sup(const FamilySpec& spec, const ParamVector& common, double y);
double log_single_obs_sup(const FamilySpec& spec, const ParamVector& common, double y);

// log_single_obs_sup separates as c(common) - [has_inv_y]*log(y); these expose
// the split so the LR engine can cache the y-free full-model fit.
bool sup_has_inv_y(FamilyId id);
double log_sup_common_term(const FamilySpec& spec, const ParamVector& common);

// Value of the varied component attaining single_obs_sup at y.
double varied_argmax(const FamilySpec& spec, const ParamVector& common, double y);

namespace detail {

// Box bound for the GG shape: past it the likelihood degenerates toward a
// spike, so fits clamp here and the LR engine treats the wall as failure.
inline constexpr double kGgLambdaBound = 8.0;

// Root of log(a) - digamma(a) = M for M > 0 (strictly decreasing left side).
// Newton with bisection safeguards; init < 0 means the log-moment start.
double solve_gamma_shape(double M, double init = -1.0, int* iterations = nullptr,
                         bool* converged = nullptr);

struct WeibullProfileFit {
  double beta = 0.0;
  double eta = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Complete-data profile solve of c/beta + mean(log x) - W(beta) = 0, where
// W is the x^beta-weighted mean of log x. c = 1 is plain ML; c = (n+1)/n adds
// the full-model +log(beta) term to the objective.
WeibullProfileFit weibull_profile_ml(const std::vector<double>& data, double newton_c,
                                     double beta_init = -1.0);

// GG maximization of data loglik (+ the y-free single-observation sup term
// when add_sup_term). Cold path is a 5-start bounded BFGS with simplex polish;
// a warm start skips the ladder unless it fails.
FittedModel gg_penalized_fit(const std::vector<double>& data, bool add_sup_term,
                             const ParamVector* warm);

}  // namespace detail

}  // namespace lrpi
