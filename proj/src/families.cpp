#include "lrpi/families.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lrpi/errors.hpp"
#include "lrpi/optimize.hpp"
#include "lrpi/special.hpp"

namespace lrpi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLog2Pi = 1.8378770664093454836;  // log(2*pi)
constexpr double kGgLambdaZero = 1e-6;  // lognormal-branch guard
using detail::kGgLambdaBound;

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw ParamDomainError(std::string(what) + " must be finite");
}

void require_positive(double v, const char* what) {
  require_finite(v, what);
  if (!(v > 0.0)) throw ParamDomainError(std::string(what) + " must be > 0");
}

// kappa*log(kappa) - kappa - lgamma(kappa); Stirling tail for huge kappa where
// the direct difference loses all precision.
double gg_G(double kappa) {
  if (kappa > 1e8) {
    const double inv = 1.0 / kappa;
    return 0.5 * std::log(kappa) - 0.5 * kLog2Pi - inv / 12.0 + inv * inv * inv / 360.0;
  }
  return kappa * std::log(kappa) - kappa - std::lgamma(kappa);
}

double gg_log_density(double mu, double sigma, double lambda, double x) {
  const double lx = std::log(x);
  const double omega = (lx - mu) / sigma;
  if (std::abs(lambda) < kGgLambdaZero) {
    return -lx - std::log(sigma) - 0.5 * kLog2Pi - 0.5 * omega * omega;
  }
  const double kappa = 1.0 / (lambda * lambda);
  const double u = lambda * omega;
  // exp(u)-u-1 >= 0, computed without cancellation near u = 0.
  const double euu = std::expm1(u) - u;
  return std::log(std::abs(lambda)) - std::log(sigma) - lx + gg_G(kappa) - kappa * euu;
}

double gg_cdf(double mu, double sigma, double lambda, double x) {
  const double omega = (std::log(x) - mu) / sigma;
  if (std::abs(lambda) < kGgLambdaZero) return normal_cdf(omega);
  const double kappa = 1.0 / (lambda * lambda);
  const double v = kappa * std::exp(lambda * omega);
  return lambda > 0.0 ? gamma_p(kappa, v) : gamma_q(kappa, v);
}

double gg_quantile(double mu, double sigma, double lambda, double p) {
  if (std::abs(lambda) < kGgLambdaZero) return std::exp(mu + sigma * normal_quantile(p));
  const double kappa = 1.0 / (lambda * lambda);
  const double v = lambda > 0.0 ? gamma_p_inv(kappa, p) : gamma_p_inv(kappa, 1.0 - p);
  return std::exp(mu + sigma * std::log(v / kappa) / lambda);
}

}  // namespace

std::string_view family_name(FamilyId id) {
  switch (id) {
    case FamilyId::Normal: return "normal";
    case FamilyId::NormalKnownSigma: return "normal-known-sigma";
    case FamilyId::Exponential: return "exponential";
    case FamilyId::TwoParamExponential: return "two-param-exponential";
    case FamilyId::UniformZeroTheta: return "uniform";
    case FamilyId::Gamma: return "gamma";
    case FamilyId::Weibull: return "weibull";
    case FamilyId::GeneralizedGamma: return "gengamma";
  }
  return "unknown";
}

FamilyId family_from_name(std::string_view name) {
  for (FamilyId id : {FamilyId::Normal, FamilyId::NormalKnownSigma, FamilyId::Exponential,
                      FamilyId::TwoParamExponential, FamilyId::UniformZeroTheta,
                      FamilyId::Gamma, FamilyId::Weibull, FamilyId::GeneralizedGamma}) {
    if (family_name(id) == name) return id;
  }
  throw UsageError("unknown family: " + std::string(name));
}

std::string_view FamilySpec::default_varied() const {
  switch (id) {
    case FamilyId::Normal:
    case FamilyId::NormalKnownSigma:
    case FamilyId::TwoParamExponential:
    case FamilyId::GeneralizedGamma: return "mu";
    case FamilyId::Exponential:
    case FamilyId::UniformZeroTheta: return "theta";
    case FamilyId::Gamma: return "beta";
    case FamilyId::Weibull: return "eta";
  }
  return "";
}

FamilySpec FamilySpec::make(FamilyId id, double known_sigma, std::string varied) {
  FamilySpec spec;
  spec.id = id;
  if (id == FamilyId::NormalKnownSigma) {
    require_positive(known_sigma, "known sigma");
    spec.known_sigma = known_sigma;
  } else if (!std::isnan(known_sigma)) {
    throw ParamDomainError("known_sigma is only meaningful for normal-known-sigma");
  }
  if (!varied.empty() && varied != spec.default_varied()) {
    throw ParamDomainError("varied_param '" + varied + "' is not the supported component '" +
                           std::string(spec.default_varied()) + "' for " +
                           std::string(family_name(id)));
  }
  spec.varied_param = std::string(spec.default_varied());
  return spec;
}

ParamVector ParamVector::normal(double mu, double sigma) {
  require_finite(mu, "mu");
  require_positive(sigma, "sigma");
  return {FamilyId::Normal, mu, sigma, 0.0, 2};
}

ParamVector ParamVector::normal_known_sigma(double mu) {
  require_finite(mu, "mu");
  return {FamilyId::NormalKnownSigma, mu, 0.0, 0.0, 1};
}

ParamVector ParamVector::exponential(double theta) {
  require_positive(theta, "theta");
  return {FamilyId::Exponential, theta, 0.0, 0.0, 1};
}

ParamVector ParamVector::two_param_exponential(double mu, double beta) {
  require_finite(mu, "mu");
  require_positive(beta, "beta");
  return {FamilyId::TwoParamExponential, mu, beta, 0.0, 2};
}

ParamVector ParamVector::uniform(double theta) {
  require_positive(theta, "theta");
  return {FamilyId::UniformZeroTheta, theta, 0.0, 0.0, 1};
}

ParamVector ParamVector::gamma(double alpha, double beta) {
  require_positive(alpha, "alpha");
  require_positive(beta, "beta");
  return {FamilyId::Gamma, alpha, beta, 0.0, 2};
}

ParamVector ParamVector::weibull(double beta, double eta) {
  require_positive(beta, "beta");
  require_positive(eta, "eta");
  return {FamilyId::Weibull, beta, eta, 0.0, 2};
}

ParamVector ParamVector::gen_gamma(double mu, double sigma, double lambda) {
  require_finite(mu, "mu");
  require_positive(sigma, "sigma");
  require_finite(lambda, "lambda");
  return {FamilyId::GeneralizedGamma, mu, sigma, lambda, 3};
}

namespace {

std::vector<std::string> param_names(FamilyId id) {
  switch (id) {
    case FamilyId::Normal: return {"mu", "sigma"};
    case FamilyId::NormalKnownSigma: return {"mu"};
    case FamilyId::Exponential: return {"theta"};
    case FamilyId::TwoParamExponential: return {"mu", "beta"};
    case FamilyId::UniformZeroTheta: return {"theta"};
    case FamilyId::Gamma: return {"alpha", "beta"};
    case FamilyId::Weibull: return {"beta", "eta"};
    case FamilyId::GeneralizedGamma: return {"mu", "sigma", "lambda"};
  }
  return {};
}

}  // namespace

ParamVector ParamVector::from_named(FamilyId id,
                                    const std::vector<std::pair<std::string, double>>& kv) {
  const auto names = param_names(id);
  if (kv.size() != names.size())
    throw ParamDomainError("expected " + std::to_string(names.size()) + " parameters for " +
                           std::string(family_name(id)));
  std::vector<double> v(names.size());
  for (std::size_t i = 0; i < names.size(); ++i) {
    const auto it = std::find_if(kv.begin(), kv.end(),
                                 [&](const auto& p) { return p.first == names[i]; });
    if (it == kv.end()) throw ParamDomainError("missing parameter '" + names[i] + "'");
    v[i] = it->second;
  }
  switch (id) {
    case FamilyId::Normal: return normal(v[0], v[1]);
    case FamilyId::NormalKnownSigma: return normal_known_sigma(v[0]);
    case FamilyId::Exponential: return exponential(v[0]);
    case FamilyId::TwoParamExponential: return two_param_exponential(v[0], v[1]);
    case FamilyId::UniformZeroTheta: return uniform(v[0]);
    case FamilyId::Gamma: return gamma(v[0], v[1]);
    case FamilyId::Weibull: return weibull(v[0], v[1]);
    case FamilyId::GeneralizedGamma: return gen_gamma(v[0], v[1], v[2]);
  }
  throw ParamDomainError("unknown family");
}

std::vector<std::pair<std::string, double>> ParamVector::named() const {
  const auto names = param_names(id_);
  std::vector<std::pair<std::string, double>> out;
  for (std::size_t i = 0; i < names.size(); ++i) out.emplace_back(names[i], v_[i]);
  return out;
}

Support family_support(FamilyId id) {
  switch (id) {
    case FamilyId::Normal:
    case FamilyId::NormalKnownSigma:
    case FamilyId::TwoParamExponential: return {-kInf, kInf};
    default: return {0.0, kInf};
  }
}

int min_fit_size(FamilyId id) {
  switch (id) {
    case FamilyId::NormalKnownSigma:
    case FamilyId::Exponential:
    case FamilyId::UniformZeroTheta: return 1;
    case FamilyId::GeneralizedGamma: return 3;
    default: return 2;
  }
}

void validate_data(const FamilySpec& spec, const std::vector<double>& data) {
  if (data.empty()) throw SupportError("empty dataset");
  const Support s = family_support(spec.id);
  for (double x : data) {
    if (!std::isfinite(x)) throw SupportError("non-finite data value");
    if (s.lo == 0.0 && !(x > 0.0))
      throw SupportError("value " + std::to_string(x) + " outside the positive support of " +
                         std::string(family_name(spec.id)));
  }
}

double log_density(const FamilySpec& spec, const ParamVector& params, double x) {
  if (params.family() != spec.id) throw ParamDomainError("params built for a different family");
  if (!std::isfinite(x)) return -kInf;
  switch (spec.id) {
    case FamilyId::Normal: {
      const double z = (x - params.at(0)) / params.at(1);
      return -std::log(params.at(1)) - 0.5 * kLog2Pi - 0.5 * z * z;
    }
    case FamilyId::NormalKnownSigma: {
      const double z = (x - params.at(0)) / spec.known_sigma;
      return -std::log(spec.known_sigma) - 0.5 * kLog2Pi - 0.5 * z * z;
    }
    case FamilyId::Exponential: {
      if (x <= 0.0) return -kInf;
      return -std::log(params.at(0)) - x / params.at(0);
    }
    case FamilyId::TwoParamExponential: {
      if (x < params.at(0)) return -kInf;
      return -std::log(params.at(1)) - (x - params.at(0)) / params.at(1);
    }
    case FamilyId::UniformZeroTheta:
      return (x > 0.0 && x <= params.at(0)) ? -std::log(params.at(0)) : -kInf;
    case FamilyId::Gamma: {
      if (x <= 0.0) return -kInf;
      const double a = params.at(0), b = params.at(1);
      return (a - 1.0) * std::log(x) - x / b - std::lgamma(a) - a * std::log(b);
    }
    case FamilyId::Weibull: {
      if (x <= 0.0) return -kInf;
      const double b = params.at(0), e = params.at(1);
      const double z = x / e;
      return std::log(b) - std::log(e) + (b - 1.0) * std::log(z) - std::pow(z, b);
    }
    case FamilyId::GeneralizedGamma:
      if (x <= 0.0) return -kInf;
      return gg_log_density(params.at(0), params.at(1), params.at(2), x);
  }
  throw ParamDomainError("unknown family");
}

double cdf(const FamilySpec& spec, const ParamVector& params, double x) {
  switch (spec.id) {
    case FamilyId::Normal: return normal_cdf((x - params.at(0)) / params.at(1));
    case FamilyId::NormalKnownSigma: return normal_cdf((x - params.at(0)) / spec.known_sigma);
    case FamilyId::Exponential:
      return x <= 0.0 ? 0.0 : -std::expm1(-x / params.at(0));
    case FamilyId::TwoParamExponential:
      return x <= params.at(0) ? 0.0 : -std::expm1(-(x - params.at(0)) / params.at(1));
    case FamilyId::UniformZeroTheta:
      return std::clamp(x / params.at(0), 0.0, 1.0);
    case FamilyId::Gamma:
      return x <= 0.0 ? 0.0 : gamma_p(params.at(0), x / params.at(1));
    case FamilyId::Weibull:
      return x <= 0.0 ? 0.0 : -std::expm1(-std::pow(x / params.at(1), params.at(0)));
    case FamilyId::GeneralizedGamma:
      return x <= 0.0 ? 0.0 : gg_cdf(params.at(0), params.at(1), params.at(2), x);
  }
  throw ParamDomainError("unknown family");
}

double quantile(const FamilySpec& spec, const ParamVector& params, double p) {
  if (!(p > 0.0 && p < 1.0)) throw ParamDomainError("quantile requires p in (0,1)");
  switch (spec.id) {
    case FamilyId::Normal: return params.at(0) + params.at(1) * normal_quantile(p);
    case FamilyId::NormalKnownSigma: return params.at(0) + spec.known_sigma * normal_quantile(p);
    case FamilyId::Exponential: return -params.at(0) * std::log1p(-p);
    case FamilyId::TwoParamExponential: return params.at(0) - params.at(1) * std::log1p(-p);
    case FamilyId::UniformZeroTheta: return params.at(0) * p;
    case FamilyId::Gamma: return params.at(1) * gamma_p_inv(params.at(0), p);
    case FamilyId::Weibull:
      return params.at(1) * std::pow(-std::log1p(-p), 1.0 / params.at(0));
    case FamilyId::GeneralizedGamma:
      return gg_quantile(params.at(0), params.at(1), params.at(2), p);
  }
  throw ParamDomainError("unknown family");
}

double log_likelihood(const FamilySpec& spec, const ParamVector& params,
                      const std::vector<double>& data) {
  double acc = 0.0;
  for (double x : data) acc += log_density(spec, params, x);
  return acc;
}

double sample_one(const FamilySpec& spec, const ParamVector& params, Rng& rng) {
  switch (spec.id) {
    case FamilyId::Normal: return params.at(0) + params.at(1) * rng.normal();
    case FamilyId::NormalKnownSigma: return params.at(0) + spec.known_sigma * rng.normal();
    case FamilyId::Exponential: return params.at(0) * rng.exponential();
    case FamilyId::TwoParamExponential: return params.at(0) + params.at(1) * rng.exponential();
    case FamilyId::UniformZeroTheta: return params.at(0) * rng.uniform01();
    case FamilyId::Gamma: return params.at(1) * rng.gamma(params.at(0));
    case FamilyId::Weibull:
      return params.at(1) * std::pow(rng.exponential(), 1.0 / params.at(0));
    case FamilyId::GeneralizedGamma: {
      const double mu = params.at(0), sigma = params.at(1), lambda = params.at(2);
      if (std::abs(lambda) < kGgLambdaZero) return std::exp(mu + sigma * rng.normal());
      const double kappa = 1.0 / (lambda * lambda);
      const double v = rng.gamma(kappa);
      return std::exp(mu + sigma * std::log(v / kappa) / lambda);
    }
  }
  throw ParamDomainError("unknown family");
}

std::vector<double> sample(const FamilySpec& spec, const ParamVector& params,
                           std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> out(count);
  for (auto& v : out) v = sample_one(spec, params, rng);
  return out;
}

namespace {

FittedModel finish(const FamilySpec& spec, ParamVector params,
                   const std::vector<double>& data, bool converged, int iterations) {
  FittedModel m;
  m.spec = spec;
  m.params = params;
  m.log_likelihood = log_likelihood(spec, params, data);
  m.converged = converged;
  m.iterations = iterations;
  return m;
}

FittedModel gamma_fit(const FamilySpec& spec, const std::vector<double>& data,
                      double alpha_init) {
  const double xbar = mean(data);
  double mean_log = 0.0;
  for (double x : data) mean_log += std::log(x);
  mean_log /= static_cast<double>(data.size());
  const double M = std::log(xbar) - mean_log;
  if (!(M > 0.0))
    throw DegenerateDataError("gamma fit: all data values equal");
  int it = 0;
  bool converged = false;
  const double a = detail::solve_gamma_shape(M, alpha_init, &it, &converged);
  return finish(spec, ParamVector::gamma(a, xbar / a), data, converged, it);
}

// Shared Weibull profile solver. Sums run over the failure times plus, for the
// censored case, the survivor mass (n - r) at t_c. Works on shifted exponents
// so x^beta never overflows.
struct WeibullProfile {
  const std::vector<double>& logs;  // log failure times
  double log_tc = 0.0;
  double censored_weight = 0.0;  // n - r (0 for complete data)
  double r = 0.0;                // number of failures
  double mean_log = 0.0;
  double max_log = 0.0;
  double newton_c = 1.0;  // coefficient of 1/beta in the profile equation

  // W(beta) = weighted mean of log x under weights x^beta; also dW via second
  // moments. Returns {W, W'} and log of the weighted power sum for eta.
  void moments(double beta, double& W, double& dW, double& log_s0) const {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
    for (double lx : logs) {
      const double w = std::exp(beta * (lx - max_log));
      s0 += w;
      s1 += w * lx;
      s2 += w * lx * lx;
    }
    if (censored_weight > 0.0) {
      const double w = censored_weight * std::exp(beta * (log_tc - max_log));
      s0 += w;
      s1 += w * log_tc;
      s2 += w * log_tc * log_tc;
    }
    W = s1 / s0;
    dW = s2 / s0 - W * W;
    log_s0 = std::log(s0) + beta * max_log;
  }

  double equation(double beta) const {
    double W, dW, ls0;
    moments(beta, W, dW, ls0);
    return newton_c / beta + mean_log - W;
  }
};

detail::WeibullProfileFit weibull_profile_solve(const WeibullProfile& prof,
                                                double beta_init) {
  double b = std::clamp(beta_init, 1e-3, 1e3);
  // Bracket the root of the decreasing profile equation.
  double lo = b, hi = b;
  while (prof.equation(lo) < 0.0 && lo > 1e-8) lo *= 0.25;
  while (prof.equation(hi) > 0.0 && hi < 1e8) hi *= 4.0;
  if (prof.equation(lo) < 0.0 || prof.equation(hi) > 0.0)
    throw FitError("weibull fit: profile equation has no root in [1e-8, 1e8]");

  detail::WeibullProfileFit sol;
  b = std::clamp(b, lo, hi);
  for (; sol.iterations < 200; ++sol.iterations) {
    double W, dW, ls0;
    prof.moments(b, W, dW, ls0);
    const double q = prof.newton_c / b + prof.mean_log - W;
    if (std::abs(q) < 1e-14 * (1.0 + std::abs(prof.mean_log))) {
      sol.converged = true;
      break;
    }
    if (q > 0.0) lo = b; else hi = b;
    const double qp = -prof.newton_c / (b * b) - dW;
    double bn = b - q / qp;
    if (!(bn > lo && bn < hi)) bn = 0.5 * (lo + hi);
    if (std::abs(bn - b) < 1e-13 * (1.0 + b)) {
      b = bn;
      sol.converged = true;
      break;
    }
    b = bn;
  }
  double W, dW, ls0;
  prof.moments(b, W, dW, ls0);
  sol.beta = b;
  sol.eta = std::exp((ls0 - std::log(prof.r)) / b);
  return sol;
}

double log_sd(const std::vector<double>& logs, double mean_log) {
  double acc = 0.0;
  for (double lx : logs) acc += (lx - mean_log) * (lx - mean_log);
  return std::sqrt(acc / static_cast<double>(logs.size()));
}

FittedModel weibull_fit(const FamilySpec& spec, const std::vector<double>& data,
                        double beta_init) {
  const detail::WeibullProfileFit sol = detail::weibull_profile_ml(data, 1.0, beta_init);
  return finish(spec, ParamVector::weibull(sol.beta, sol.eta), data, sol.converged,
                sol.iterations);
}

}  // namespace

namespace detail {

double solve_gamma_shape(double M, double init, int* iterations, bool* converged) {
  if (!(M > 0.0)) throw DegenerateDataError("gamma shape equation needs M > 0");
  double a = init > 0.0
                 ? init
                 : (3.0 - M + std::sqrt((M - 3.0) * (M - 3.0) + 24.0 * M)) / (12.0 * M);
  a = std::clamp(a, 1e-8, 1e8);
  double lo = 1e-10, hi = 1e10;
  int it = 0;
  bool conv = false;
  for (; it < 200; ++it) {
    const double g = std::log(a) - digamma(a) - M;
    if (std::abs(g) < 1e-13) {
      conv = true;
      break;
    }
    if (g > 0.0) lo = a; else hi = a;  // g decreasing: root above a iff g > 0
    const double gp = 1.0 / a - trigamma(a);
    double an = a - g / gp;
    if (!(an > lo && an < hi)) an = std::sqrt(lo * hi);
    if (std::abs(an - a) < 1e-13 * (1.0 + a)) {
      a = an;
      conv = true;
      break;
    }
    a = an;
  }
  if (!std::isfinite(a) || a <= 0.0) throw FitError("gamma shape solve diverged");
  if (iterations != nullptr) *iterations = it;
  if (converged != nullptr) *converged = conv;
  return a;
}

WeibullProfileFit weibull_profile_ml(const std::vector<double>& data, double newton_c,
                                     double beta_init) {
  std::vector<double> logs(data.size());
  std::transform(data.begin(), data.end(), logs.begin(),
                 [](double x) { return std::log(x); });
  const double ml = mean(logs);
  const double sd = log_sd(logs, ml);
  if (sd == 0.0) throw DegenerateDataError("weibull fit: all data values equal");
  WeibullProfile prof{logs, 0.0, 0.0, static_cast<double>(data.size()), ml,
                      *std::max_element(logs.begin(), logs.end()), newton_c};
  const double init = beta_init > 0.0 ? beta_init : 1.2825498301618641 / sd;
  return weibull_profile_solve(prof, init);
}

FittedModel gg_penalized_fit(const std::vector<double>& data, bool add_sup_term,
                             const ParamVector* warm) {
  std::vector<double> logs(data.size());
  std::transform(data.begin(), data.end(), logs.begin(),
                 [](double x) { return std::log(x); });
  const double m = mean(logs);
  const double s = log_sd(logs, m);
  if (s == 0.0) throw DegenerateDataError("gg fit: all data values equal");

  double skew = 0.0;
  for (double lx : logs) skew += std::pow((lx - m) / s, 3.0);
  skew /= static_cast<double>(logs.size());

  const double ls = std::log(s);
  const std::vector<double> lo{m - 60.0 * (s + 0.1), ls - 10.0, -kGgLambdaBound};
  const std::vector<double> hi{m + 60.0 * (s + 0.1), ls + 10.0, kGgLambdaBound};

  // The sup term equals log_sup_common_term for GG; inlined to keep the
  // objective self-contained.
  const auto obj = [&data, add_sup_term](const std::vector<double>& p) {
    const double sigma = std::exp(p[1]);
    double acc = 0.0;
    for (double x : data) acc -= gg_log_density(p[0], sigma, p[2], x);
    if (add_sup_term) {
      const double lambda = p[2];
      if (std::abs(lambda) < kGgLambdaZero) {
        acc -= -0.5 * kLog2Pi - std::log(sigma);
      } else {
        const double kappa = 1.0 / (lambda * lambda);
        acc -= std::log(std::abs(lambda)) + gg_G(kappa) - std::log(sigma);
      }
    }
    return std::isfinite(acc) ? acc : 1e300;
  };

  std::vector<std::vector<double>> starts;
  if (warm != nullptr && warm->size() == 3) {
    starts.push_back({warm->at(0), std::log(warm->at(1)),
                      std::clamp(warm->at(2), -kGgLambdaBound, kGgLambdaBound)});
  } else {
    const double lam_mm = std::clamp(-skew, -4.0, 4.0);
    for (double lam0 : {lam_mm, -1.0, 0.0, 1.0, 2.0}) starts.push_back({m, ls, lam0});
  }

  OptimumND best;
  best.f = kInf;
  int iters = 0;
  for (const auto& x0 : starts) {
    OptimumND r = bfgs_box_min(obj, x0, lo, hi);
    iters += r.iterations;
    if (r.f < best.f) best = std::move(r);
  }
  if (!std::isfinite(best.f)) throw FitError("gg fit: no start produced a finite value");

  // Simplex polish pins the optimum well past the finite-difference floor;
  // warm paths need it just as much (a lone box-BFGS stalls in the curved
  // sigma-lambda valley and the stall point wobbles between nearby inputs).
  OptimumND polish = nelder_mead_min(obj, best.x, {0.05, 0.05, 0.05}, 1e-13, 1e-11);
  iters += polish.iterations;
  if (polish.f < best.f) best = std::move(polish);

  const FamilySpec spec = FamilySpec::make(FamilyId::GeneralizedGamma);
  const ParamVector params =
      ParamVector::gen_gamma(best.x[0], std::exp(best.x[1]), best.x[2]);
  FittedModel model = finish(spec, params, data, true, iters);
  if (!std::isfinite(model.log_likelihood)) throw FitError("gg fit: non-finite likelihood");
  return model;
}

}  // namespace detail

FittedModel fit_ml(const FamilySpec& spec, const std::vector<double>& data) {
  return fit_ml_warm(spec, data, ParamVector{});
}

FittedModel fit_ml_warm(const FamilySpec& spec, const std::vector<double>& data,
                        const ParamVector& init) {
  validate_data(spec, data);
  const int n = static_cast<int>(data.size());
  if (n < min_fit_size(spec.id))
    throw DegenerateDataError("need at least " + std::to_string(min_fit_size(spec.id)) +
                              " observations for " + std::string(family_name(spec.id)));
  const bool warm = init.size() > 0 && init.family() == spec.id;

  switch (spec.id) {
    case FamilyId::Normal: {
      const double mu = mean(data);
      double s2 = 0.0;
      for (double x : data) s2 += (x - mu) * (x - mu);
      s2 /= n;
      if (!(s2 > 0.0)) throw DegenerateDataError("normal fit: zero variance");
      return finish(spec, ParamVector::normal(mu, std::sqrt(s2)), data, true, 0);
    }
    case FamilyId::NormalKnownSigma:
      return finish(spec, ParamVector::normal_known_sigma(mean(data)), data, true, 0);
    case FamilyId::Exponential:
      return finish(spec, ParamVector::exponential(mean(data)), data, true, 0);
    case FamilyId::TwoParamExponential: {
      const double mu = *std::min_element(data.begin(), data.end());
      const double beta = mean(data) - mu;
      if (!(beta > 0.0)) throw DegenerateDataError("two-param exponential fit: zero spread");
      return finish(spec, ParamVector::two_param_exponential(mu, beta), data, true, 0);
    }
    case FamilyId::UniformZeroTheta:
      return finish(spec, ParamVector::uniform(*std::max_element(data.begin(), data.end())),
                    data, true, 0);
    case FamilyId::Gamma:
      return gamma_fit(spec, data, warm ? init.at(0) : -1.0);
    case FamilyId::Weibull:
      return weibull_fit(spec, data, warm ? init.at(0) : -1.0);
    case FamilyId::GeneralizedGamma: {
      if (warm) {
        try {
          return detail::gg_penalized_fit(data, false, &init);
        } catch (const Error&) {
          // fall through to the cold multistart ladder
        }
      }
      return detail::gg_penalized_fit(data, false, nullptr);
    }
  }
  throw ParamDomainError("unknown family");
}

double censored_log_likelihood(const ParamVector& weibull_params,
                               const std::vector<double>& times, int n, double t_c) {
  const FamilySpec spec = FamilySpec::make(FamilyId::Weibull);
  const double b = weibull_params.at(0), e = weibull_params.at(1);
  double acc = log_likelihood(spec, weibull_params, times);
  const double surv = static_cast<double>(n) - static_cast<double>(times.size());
  if (surv > 0.0) acc -= surv * std::pow(t_c / e, b);
  return acc;
}

FittedModel fit_ml_type1_censored(const std::vector<double>& times, int n, double t_c) {
  if (!(t_c > 0.0)) throw ParamDomainError("censoring time must be > 0");
  const int r = static_cast<int>(times.size());
  if (r == 0) throw DegenerateDataError("no failures before the censoring time");
  if (r > n) throw ParamDomainError("more failures than units");
  for (double t : times) {
    if (!(t > 0.0) || t > t_c * (1.0 + 1e-12))
      throw SupportError("failure times must lie in (0, t_c]");
  }

  std::vector<double> logs(times.size());
  std::transform(times.begin(), times.end(), logs.begin(),
                 [](double x) { return std::log(x); });
  const double ml = mean(logs);
  const double sd = log_sd(logs, ml);
  const bool no_survivors = r == n;
  if (sd == 0.0 && (no_survivors || std::abs(times[0] - t_c) < 1e-12 * t_c))
    throw DegenerateDataError("censored weibull fit: failure times carry no spread");

  WeibullProfile prof{logs, std::log(t_c), static_cast<double>(n - r),
                      static_cast<double>(r), ml,
                      std::max(*std::max_element(logs.begin(), logs.end()), std::log(t_c))};
  const double init = sd > 0.0 ? 1.2825498301618641 / sd : 1.0;
  const detail::WeibullProfileFit sol = weibull_profile_solve(prof, init);

  FittedModel m;
  m.spec = FamilySpec::make(FamilyId::Weibull);
  m.params = ParamVector::weibull(sol.beta, sol.eta);
  m.log_likelihood = censored_log_likelihood(m.params, times, n, t_c);
  m.converged = sol.converged;
  m.iterations = sol.iterations;
  return m;
}

bool sup_has_inv_y(FamilyId id) {
  switch (id) {
    case FamilyId::Normal:
    case FamilyId::NormalKnownSigma:
    case FamilyId::TwoParamExponential: return false;
    default: return true;
  }
}

double log_sup_common_term(const FamilySpec& spec, const ParamVector& common) {
  switch (spec.id) {
    case FamilyId::Normal: return -std::log(common.at(1)) - 0.5 * kLog2Pi;
    case FamilyId::NormalKnownSigma: return -std::log(spec.known_sigma) - 0.5 * kLog2Pi;
    case FamilyId::Exponential: return -1.0;
    case FamilyId::TwoParamExponential: return -std::log(common.at(1));
    case FamilyId::UniformZeroTheta: return 0.0;
    case FamilyId::Gamma: {
      const double a = common.at(0);
      return a * std::log(a) - a - std::lgamma(a);
    }
    case FamilyId::Weibull: return std::log(common.at(0)) - 1.0;
    case FamilyId::GeneralizedGamma: {
      const double sigma = common.at(1), lambda = common.at(2);
      if (std::abs(lambda) < kGgLambdaZero) return -0.5 * kLog2Pi - std::log(sigma);
      const double kappa = 1.0 / (lambda * lambda);
      return std::log(std::abs(lambda)) + gg_G(kappa) - std::log(sigma);
    }
  }
  throw ParamDomainError("unknown family");
}

double log_single_obs_sup(const FamilySpec& spec, const ParamVector& common, double y) {
  const Support s = family_support(spec.id);
  if (!(y > s.lo || s.lo == -kInf) || !std::isfinite(y))
    throw SupportError("predictand outside the family support");
  return log_sup_common_term(spec, common) - (sup_has_inv_y(spec.id) ? std::log(y) : 0.0);
}

double single_obs_sup(const FamilySpec& spec, const ParamVector& common, double y) {
  return std::exp(log_single_obs_sup(spec, common, y));
}

double varied_argmax(const FamilySpec& spec, const ParamVector& common, double y) {
  switch (spec.id) {
    case FamilyId::Normal:
    case FamilyId::NormalKnownSigma:
    case FamilyId::TwoParamExponential:
    case FamilyId::Exponential:
    case FamilyId::UniformZeroTheta: return y;
    case FamilyId::Gamma: return y / common.at(0);
    case FamilyId::Weibull: return y;
    case FamilyId::GeneralizedGamma: return std::log(y);
  }
  throw ParamDomainError("unknown family");
}

}  // namespace lrpi
