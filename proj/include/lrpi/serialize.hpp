#pragma once

#include <string>
#include <vector>

#include "lrpi/bounds.hpp"
#include "lrpi/discrete.hpp"
#include "lrpi/families.hpp"
#include "lrpi/lr_engine.hpp"
#include "lrpi/simstudy.hpp"
#include "lrpi/within_sample.hpp"

namespace lrpi {

// Emitted numbers round-trip exactly: JSON uses the shortest exact decimal,
// CSV prints 17 significant digits. Non-finite doubles serialize as null.

std::string method_name(CalibrationMethod method);

std::string to_json(const FittedModel& fit);
FittedModel fitted_model_from_json(const std::string& text);

std::string to_json(const PredictionResult& result);
std::string to_json(const IntegerInterval& set);
std::string to_json(const CoverageReport& report);

// One row per method x factor x side x level, 17-significant-digit numbers.
std::string to_csv(const CoverageReport& report);

// Columns y, neg2_log_lr, signed_lr.
std::string curve_csv(const std::vector<LrCurvePoint>& curve);

// Single-column numeric CSV (one optional non-numeric header line) or a JSON
// array of numbers.
std::vector<double> read_data_file(const std::string& path);

// JSON envelope {"failure_times": [...], "n": ..., "t_c": ...}; times are
// sorted ascending on read.
CensoredSample read_censored_sample(const std::string& path);

// Coverage study configuration from JSON; the schema is documented in the
// README. Unknown keys are rejected to catch typos.
CoverageConfig coverage_config_from_json(const std::string& text);

std::string error_json(const std::string& type, const std::string& message);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace lrpi
