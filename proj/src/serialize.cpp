#include "lrpi/serialize.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "lrpi/errors.hpp"

namespace lrpi {

namespace {

using Json = nlohmann::ordered_json;

std::string num17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json params_json(const ParamVector& params) {
  Json obj = Json::object();
  for (const auto& [name, value] : params.named()) obj[name] = value;
  return obj;
}

Json parse(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const std::exception& e) {
    throw UsageError(std::string("invalid JSON: ") + e.what());
  }
}

double as_number(const Json& j, const std::string& key) {
  if (!j.contains(key) || !j[key].is_number())
    throw UsageError("expected numeric field '" + key + "'");
  return j[key].get<double>();
}

std::vector<double> as_number_array(const Json& j) {
  if (!j.is_array()) throw UsageError("expected a JSON array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) throw UsageError("expected a JSON array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

CoverageMethod method_from_name(const std::string& s) {
  if (s == "lr-bootstrap") return CoverageMethod::LrBootstrap;
  if (s == "lr-chisq") return CoverageMethod::LrChiSquare;
  if (s == "lr-limit") return CoverageMethod::LrLimit;
  if (s == "plug-in") return CoverageMethod::PlugIn;
  throw UsageError("unknown method '" + s +
                   "' (expected lr-bootstrap, lr-chisq, lr-limit, plug-in)");
}

Side side_from_name(const std::string& s) {
  if (s == "lower") return Side::Lower;
  if (s == "upper") return Side::Upper;
  if (s == "two-sided") return Side::TwoSided;
  throw UsageError("unknown side '" + s + "' (expected lower, upper, two-sided)");
}

WithinSampleVariant variant_from_name(const std::string& s) {
  if (s == "survival-adjusted") return WithinSampleVariant::SurvivalAdjusted;
  if (s == "failures-only") return WithinSampleVariant::FailuresOnly;
  throw UsageError("unknown variant '" + s +
                   "' (expected survival-adjusted, failures-only)");
}

void reject_unknown_keys(const Json& obj, std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* a : allowed)
      if (item.key() == a) {
        known = true;
        break;
      }
    if (!known) throw UsageError("unknown config key '" + item.key() + "'");
  }
}

}  // namespace

std::string method_name(CalibrationMethod method) {
  switch (method) {
    case CalibrationMethod::Bootstrap: return "bootstrap";
    case CalibrationMethod::ChiSquare: return "chisq";
    case CalibrationMethod::LimitPlugin: return "limit";
    case CalibrationMethod::PlugIn: return "plugin";
  }
  return "unknown";
}

std::string to_json(const FittedModel& fit) {
  Json j;
  j["family"] = std::string(family_name(fit.spec.id));
  if (fit.spec.id == FamilyId::NormalKnownSigma)
    j["known_sigma"] = fit.spec.known_sigma;
  j["params"] = params_json(fit.params);
  j["log_likelihood"] = fit.log_likelihood;
  j["converged"] = fit.converged;
  j["iterations"] = fit.iterations;
  return j.dump(2) + "\n";
}

FittedModel fitted_model_from_json(const std::string& text) {
  const Json j = parse(text);
  if (!j.is_object() || !j.contains("family") || !j["family"].is_string())
    throw UsageError("fitted-model JSON needs a 'family' string");
  FittedModel fit;
  const FamilyId id = family_from_name(j["family"].get<std::string>());
  const double sigma =
      id == FamilyId::NormalKnownSigma ? as_number(j, "known_sigma") : 0.0;
  fit.spec = id == FamilyId::NormalKnownSigma
                 ? FamilySpec::make(id, sigma)
                 : FamilySpec::make(id);
  if (!j.contains("params") || !j["params"].is_object())
    throw UsageError("fitted-model JSON needs a 'params' object");
  std::vector<std::pair<std::string, double>> kv;
  for (const auto& item : j["params"].items()) {
    if (!item.value().is_number())
      throw UsageError("parameter '" + item.key() + "' must be numeric");
    kv.emplace_back(item.key(), item.value().get<double>());
  }
  fit.params = ParamVector::from_named(id, kv);
  if (j.contains("log_likelihood")) fit.log_likelihood = as_number(j, "log_likelihood");
  if (j.contains("converged")) fit.converged = j["converged"].get<bool>();
  if (j.contains("iterations")) fit.iterations = j["iterations"].get<int>();
  return fit;
}

std::string to_json(const PredictionResult& result) {
  Json j;
  j["lower"] = result.lower;
  j["upper"] = result.upper;
  j["level"] = result.level;
  j["method"] = method_name(result.method);
  j["y0"] = result.y0;
  j["lambda"] = result.lambda;
  j["zeta_lo"] = result.zeta_lo;
  j["zeta_hi"] = result.zeta_hi;
  j["lower_at_boundary"] = result.lower_at_boundary;
  j["upper_at_boundary"] = result.upper_at_boundary;
  j["iterations"] = result.iterations;
  j["bracket_expansions"] = result.bracket_expansions;
  j["multimodal"] = result.multimodal;
  Json comps = Json::array();
  for (const auto& [lo, hi] : result.components) comps.push_back(Json::array({lo, hi}));
  j["components"] = comps;
  return j.dump(2) + "\n";
}

std::string to_json(const IntegerInterval& set) {
  Json j;
  j["lo"] = set.lo;
  j["hi"] = set.hi;
  j["below_nominal"] = set.below_nominal;
  return j.dump(2) + "\n";
}

std::string to_json(const CoverageReport& report) {
  Json j;
  j["seed"] = report.seed;
  j["N"] = report.N;
  j["B"] = report.B;
  Json rows = Json::array();
  for (const CoverageRow& r : report.rows) {
    Json row;
    row["method"] = r.method;
    row["side"] = r.side;
    row["level"] = r.level;
    row["factor"] = r.factor_name;
    row["value"] = r.factor_value;
    row["coverage"] = r.coverage;
    row["se"] = r.se;
    row["n_effective"] = r.n_effective;
    row["discarded"] = r.discarded;
    rows.push_back(std::move(row));
  }
  j["rows"] = rows;
  return j.dump(2) + "\n";
}

std::string to_csv(const CoverageReport& report) {
  std::string out = "method,side,level,factor,value,coverage,se,n_effective,discarded\n";
  for (const CoverageRow& r : report.rows) {
    out += r.method + ',' + r.side + ',' + num17(r.level) + ',' + r.factor_name +
           ',' + num17(r.factor_value) + ',' + num17(r.coverage) + ',' +
           num17(r.se) + ',' + std::to_string(r.n_effective) + ',' +
           std::to_string(r.discarded) + '\n';
  }
  return out;
}

std::string curve_csv(const std::vector<LrCurvePoint>& curve) {
  std::string out = "y,neg2_log_lr,signed_lr\n";
  for (const LrCurvePoint& p : curve)
    out += num17(p.y) + ',' + num17(p.neg2_log_lr) + ',' + num17(p.signed_value) + '\n';
  return out;
}

std::vector<double> read_data_file(const std::string& path) {
  const std::string text = read_text_file(path);
  std::size_t k = 0;
  while (k < text.size() && std::isspace(static_cast<unsigned char>(text[k]))) ++k;
  if (k == text.size()) throw UsageError("data file is empty: " + path);
  if (text[k] == '[') return as_number_array(parse(text));

  std::vector<double> out;
  std::istringstream lines(text);
  std::string line;
  bool first = true;
  while (std::getline(lines, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    std::size_t b = 0;
    while (b < line.size() && line[b] == ' ') ++b;
    line = line.substr(b);
    if (line.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    bool ok = true;
    try {
      v = std::stod(line, &used);
    } catch (const std::exception&) {
      ok = false;
    }
    if (ok && used == line.size()) {
      out.push_back(v);
    } else if (first) {
      // a single non-numeric header line is allowed
    } else {
      throw UsageError("non-numeric CSV line: '" + line + "'");
    }
    first = false;
  }
  if (out.empty()) throw UsageError("no numeric values in data file: " + path);
  return out;
}

CensoredSample read_censored_sample(const std::string& path) {
  const Json j = parse(read_text_file(path));
  if (!j.is_object() || !j.contains("failure_times") || !j.contains("n") ||
      !j.contains("t_c"))
    throw UsageError(
        "within-sample data needs {\"failure_times\": [...], \"n\": ..., "
        "\"t_c\": ...}");
  CensoredSample s;
  s.failure_times = as_number_array(j["failure_times"]);
  std::sort(s.failure_times.begin(), s.failure_times.end());
  if (!j["n"].is_number_integer()) throw UsageError("'n' must be an integer");
  s.n = j["n"].get<int>();
  s.t_c = as_number(j, "t_c");
  return s;
}

CoverageConfig coverage_config_from_json(const std::string& text) {
  const Json j = parse(text);
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw UsageError("coverage config needs a 'kind' string");
  CoverageConfig cfg;
  const std::string kind = j["kind"].get<std::string>();

  const auto common = [&](std::initializer_list<const char*> extra) {
    std::vector<const char*> allowed{"kind", "seed", "N", "B", "levels", "sides"};
    allowed.insert(allowed.end(), extra.begin(), extra.end());
    for (const auto& item : j.items()) {
      bool known = false;
      for (const char* a : allowed)
        if (item.key() == a) {
          known = true;
          break;
        }
      if (!known) throw UsageError("unknown config key '" + item.key() + "'");
    }
  };
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("N")) cfg.N = j["N"].get<int>();
  if (j.contains("B")) cfg.B = j["B"].get<int>();
  if (j.contains("levels")) {
    cfg.levels.clear();
    for (const double v : as_number_array(j["levels"])) cfg.levels.push_back(v);
  }
  if (j.contains("sides")) {
    cfg.sides.clear();
    for (const auto& s : j["sides"]) cfg.sides.push_back(side_from_name(s.get<std::string>()));
  }

  if (kind == "continuous") {
    common({"family", "sigma", "points", "methods", "limit_draws", "limit_form"});
    cfg.kind = CoverageConfig::Kind::Continuous;
    if (!j.contains("family")) throw UsageError("continuous config needs 'family'");
    const FamilyId id = family_from_name(j["family"].get<std::string>());
    cfg.spec = id == FamilyId::NormalKnownSigma
                   ? FamilySpec::make(id, as_number(j, "sigma"))
                   : FamilySpec::make(id);
    if (!j.contains("points") || !j["points"].is_array() || j["points"].empty())
      throw UsageError("continuous config needs a nonempty 'points' array");
    for (const auto& pj : j["points"]) {
      reject_unknown_keys(pj, {"params", "n", "factor", "value"});
      ContinuousPoint pt;
      if (!pj.contains("params") || !pj["params"].is_object())
        throw UsageError("each point needs a 'params' object");
      std::vector<std::pair<std::string, double>> kv;
      for (const auto& item : pj["params"].items())
        kv.emplace_back(item.key(), item.value().get<double>());
      pt.truth = ParamVector::from_named(id, kv);
      pt.n = pj.contains("n") ? pj["n"].get<int>() : 10;
      pt.factor_name = pj.contains("factor") ? pj["factor"].get<std::string>() : "n";
      pt.factor_value = pj.contains("value") ? pj["value"].get<double>()
                                             : static_cast<double>(pt.n);
      cfg.points.push_back(std::move(pt));
    }
    if (j.contains("methods")) {
      cfg.methods.clear();
      for (const auto& m : j["methods"])
        cfg.methods.push_back(method_from_name(m.get<std::string>()));
    }
    if (j.contains("limit_draws")) cfg.limit_draws = j["limit_draws"].get<int>();
    if (j.contains("limit_form")) {
      const std::string f = j["limit_form"].get<std::string>();
      if (f == "non-negative") cfg.limit_form = GammaLimitForm::NonNegative;
      else if (f == "shifted-log") cfg.limit_form = GammaLimitForm::ShiftedLog;
      else throw UsageError("unknown limit_form '" + f + "'");
    }
  } else if (kind == "binomial" || kind == "poisson") {
    common({"rates", "n", "m", "corrected"});
    cfg.kind = kind == "binomial" ? CoverageConfig::Kind::Binomial
                                  : CoverageConfig::Kind::Poisson;
    if (!j.contains("rates")) throw UsageError(kind + " config needs 'rates'");
    cfg.rate_grid = as_number_array(j["rates"]);
    if (j.contains("n")) cfg.trials_n = as_number(j, "n");
    if (j.contains("m")) cfg.trials_m = as_number(j, "m");
    if (j.contains("corrected")) cfg.corrected = j["corrected"].get<bool>();
  } else if (kind == "within-sample") {
    common({"shape", "p_f1", "d", "expected_events", "variants"});
    cfg.kind = CoverageConfig::Kind::WithinSample;
    if (j.contains("shape")) cfg.ws_shape = as_number(j, "shape");
    if (j.contains("p_f1")) cfg.ws_pf1 = as_number(j, "p_f1");
    if (j.contains("d")) cfg.ws_d = as_number(j, "d");
    if (!j.contains("expected_events"))
      throw UsageError("within-sample config needs 'expected_events'");
    cfg.expected_events = as_number_array(j["expected_events"]);
    if (j.contains("variants")) {
      cfg.ws_variants.clear();
      for (const auto& v : j["variants"])
        cfg.ws_variants.push_back(variant_from_name(v.get<std::string>()));
    }
  } else {
    throw UsageError("unknown coverage kind '" + kind + "'");
  }
  return cfg;
}

std::string error_json(const std::string& type, const std::string& message) {
  Json j;
  j["error"]["type"] = type;
  j["error"]["message"] = message;
  return j.dump() + "\n";
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write file: " + path);
  out << content;
  if (!out.flush()) throw UsageError("failed writing file: " + path);
}

}  // namespace lrpi
