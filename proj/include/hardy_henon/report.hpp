#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "params.hpp"

namespace hh {

using Json = nlohmann::ordered_json;

/// Rounds to 12 significant digits; non-finite values pass through.
inline double round12(double x) {
  if (!std::isfinite(x) || x == 0.0) return x;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

/// Numbers are rounded recursively; NaN and ±inf become the strings "nan", "inf", "-inf".
inline Json round_json(const Json& j) {
  if (j.is_number_float()) {
    const double x = j.get<double>();
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return round12(x);
  }
  if (j.is_array()) {
    Json out = Json::array();
    for (const auto& e : j) out.push_back(round_json(e));
    return out;
  }
  if (j.is_object()) {
    Json out = Json::object();
    for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = round_json(it.value());
    return out;
  }
  return j;
}

/// One reported quantity. `limit` is absent for values reported without a pass/fail bound; they
/// still name the tolerance ("print_digits") that governs their precision.
struct ResultEntry {
  std::string name;
  Json value;
  std::string tolerance;
  std::optional<double> limit;
  bool pass = true;
};

struct RunReport {
  std::string command;
  std::optional<ProblemParams> params;
  std::vector<ResultEntry> results;
  std::map<std::string, double> tolerances;
  double elapsed = 0.0;

  RunReport() { tolerances["print_digits"] = 1e-12; }

  void info(const std::string& name, Json value) {
    results.push_back({name, std::move(value), "print_digits", std::nullopt, true});
  }
  /// Records value ≤ limit under the named tolerance.
  bool check_le(const std::string& name, double value, const std::string& tol_name, double limit) {
    tolerances[tol_name] = limit;
    const bool ok = value <= limit;
    results.push_back({name, value, tol_name, limit, ok});
    return ok;
  }
  /// Records a boolean outcome; the tolerance names the rule that decided it and its threshold.
  bool check_true(const std::string& name, bool ok, const std::string& tol_name, double tol_value,
                  Json value = nullptr) {
    tolerances[tol_name] = tol_value;
    if (value.is_null()) value = ok;
    results.push_back({name, std::move(value), tol_name, std::nullopt, ok});
    return ok;
  }
  bool all_pass() const {
    for (const auto& r : results)
      if (!r.pass) return false;
    return true;
  }
  std::vector<std::string> failures() const {
    std::vector<std::string> out;
    for (const auto& r : results)
      if (!r.pass) out.push_back(r.name);
    return out;
  }
};

inline Json params_json(const ProblemParams& q) {
  return Json{{"n", q.n}, {"sigma", q.sigma}, {"alpha", q.alpha}, {"p", q.p}};
}

inline Json report_json(const RunReport& r, bool with_elapsed = true) {
  Json j;
  j["command"] = r.command;
  j["params"] = r.params ? params_json(*r.params) : Json(nullptr);
  Json res = Json::array();
  for (const auto& e : r.results) {
    Json x;
    x["name"] = e.name;
    x["value"] = e.value;
    x["tolerance"] = e.tolerance;
    x["limit"] = e.limit ? Json(*e.limit) : Json(nullptr);
    x["pass"] = e.pass;
    res.push_back(std::move(x));
  }
  j["results"] = std::move(res);
  Json tol = Json::object();
  for (const auto& [k, v] : r.tolerances) tol[k] = v;
  j["tolerances"] = std::move(tol);
  j["status"] = r.all_pass() ? "ok" : "tolerance_violation";
  j["failures"] = r.failures();
  if (with_elapsed) j["elapsed"] = r.elapsed;
  return round_json(j);
}

enum class ReportFormat { Json, Csv };

inline const std::vector<std::string>& report_csv_columns() {
  static const std::vector<std::string> cols = {"name", "value", "tolerance", "limit", "pass"};
  return cols;
}

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

/// JSON: one object followed by a newline. CSV: the result entries with report_csv_columns() as
/// the header; non-scalar values are written as compact JSON.
inline std::string serialize_report(const RunReport& r, ReportFormat fmt, bool with_elapsed = true) {
  const Json j = report_json(r, with_elapsed);
  if (fmt == ReportFormat::Json) return j.dump(2) + "\n";
  std::ostringstream os;
  const auto& cols = report_csv_columns();
  for (std::size_t c = 0; c < cols.size(); ++c) os << (c ? "," : "") << cols[c];
  os << "\n";
  for (const auto& e : j["results"]) {
    const auto& v = e["value"];
    const std::string vs = v.is_string() ? v.get<std::string>() : v.dump();
    os << detail::csv_field(e["name"].get<std::string>()) << "," << detail::csv_field(vs) << ","
       << detail::csv_field(e["tolerance"].get<std::string>()) << "," << (e["limit"].is_null() ? "" : e["limit"].dump())
       << "," << (e["pass"].get<bool>() ? "true" : "false") << "\n";
  }
  return os.str();
}

/// Plain numeric table: header line then rows, LF line endings, 12 significant digits.
inline std::string csv_table(const std::vector<std::string>& header, const std::vector<std::vector<double>>& columns) {
  std::ostringstream os;
  for (std::size_t c = 0; c < header.size(); ++c) os << (c ? "," : "") << header[c];
  os << "\n";
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  char buf[40];
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      std::snprintf(buf, sizeof buf, "%.12g", columns[c][i]);
      os << (c ? "," : "") << buf;
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace hh
