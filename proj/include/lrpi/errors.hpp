#pragma once

#include <stdexcept>
#include <string>

namespace lrpi {

// Base for every library failure. Callers that need machine-readable output
// switch on kind() rather than parsing what().
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& msg)
      : std::runtime_error(msg), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

// Parameter vector violates a family constraint (sigma <= 0, theta <= 0, ...).
struct ParamDomainError : Error {
  explicit ParamDomainError(const std::string& msg) : Error("param_domain", msg) {}
};

// A data or predictand value lies outside the family support.
struct SupportError : Error {
  explicit SupportError(const std::string& msg) : Error("support", msg) {}
};

// Numeric ML maximization failed to converge or produced a non-finite value.
struct FitError : Error {
  explicit FitError(const std::string& msg) : Error("fit", msg) {}
};

// Data carries no information for the requested fit (all values equal, r=0, ...).
struct DegenerateDataError : Error {
  explicit DegenerateDataError(const std::string& msg) : Error("degenerate_data", msg) {}
};

// Too many bootstrap replicates failed, or a calibration precondition broke.
struct CalibrationError : Error {
  explicit CalibrationError(const std::string& msg) : Error("calibration", msg) {}
};

// Root bracketing for an interval endpoint exhausted its expansion budget.
struct BracketError : Error {
  explicit BracketError(const std::string& msg) : Error("bracket", msg) {}
};

// Degenerate regression design (all covariates equal).
struct DesignError : Error {
  explicit DesignError(const std::string& msg) : Error("design", msg) {}
};

// Bad user-facing configuration; maps to CLI exit code 2.
struct UsageError : Error {
  explicit UsageError(const std::string& msg) : Error("usage", msg) {}
};

}  // namespace lrpi
