#pragma once

// Sample ingestion and report serialization.
//
// Numbers are written with 12 significant digits ("%.12g") in both CSV and
// JSON; non-finite values become NA in CSV and null in JSON.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mcmle/diagnostics.hpp"
#include "mcmle/error.hpp"
#include "mcmle/families.hpp"
#include "mcmle/montecarlo.hpp"

namespace mcmle::io {

using Json = nlohmann::ordered_json;

inline std::string format_number(double x) {
  if (!std::isfinite(x)) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

inline std::string format_number(const std::optional<double>& x) { return x ? format_number(*x) : "NA"; }

/// Rounds to 12 significant digits so JSON output matches the CSV text.
inline Json json_number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return std::stod(format_number(x));
}

inline Json json_number(const std::optional<double>& x) { return x ? json_number(*x) : Json(nullptr); }

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline double parse_double(std::string_view token, std::size_t line) {
  const std::string_view original = token;
  if (token.size() > 1 && token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
    throw Error(ErrorCode::ParseError,
                "line " + std::to_string(line) + ": not a finite number: '" + std::string(original) + "'");
  }
  return value;
}

}  // namespace detail

/// Parses either a one-column CSV whose header is `value`, or whitespace
/// separated numbers.
inline std::vector<double> parse_sample_text(std::string_view text) {
  std::vector<double> values;
  std::size_t line_no = 0;
  bool csv = false;
  bool seen_content = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const auto line = detail::trim(raw);
    if (line.empty()) continue;
    if (!seen_content) {
      seen_content = true;
      if (line == "value") {
        csv = true;
        continue;
      }
    }
    if (csv) {
      if (line.find(',') != std::string_view::npos) {
        throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected a single column");
      }
      values.push_back(detail::parse_double(line, line_no));
      continue;
    }
    std::size_t i = 0;
    while (i < line.size()) {
      const auto start = line.find_first_not_of(" \t\r", i);
      if (start == std::string_view::npos) break;
      auto stop = line.find_first_of(" \t\r", start);
      if (stop == std::string_view::npos) stop = line.size();
      values.push_back(detail::parse_double(line.substr(start, stop - start), line_no));
      i = stop;
    }
  }
  if (values.empty()) throw Error(ErrorCode::ParseError, "no observations found");
  return values;
}

inline std::vector<double> read_sample_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_sample_text(buf.str());
}

/// Writes to a sibling temporary file, then renames over `path`.
inline void write_atomic(const std::filesystem::path& path, std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out.flush()) throw Error(ErrorCode::IoError, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::IoError, "cannot rename onto " + path.string());
  }
}

// ---- estimate ---------------------------------------------------------------

inline std::string estimate_csv(const EstimateRecord& r) {
  std::string out = "family,n,theta_hat,psi_hat_mle,psi_hat_mcmle,y_statistic\n";
  out += std::string(family_name(r.family)) + "," + std::to_string(r.n) + "," + format_number(r.theta_hat) + "," +
         format_number(r.psi_hat_mle) + "," + format_number(r.psi_hat_mcmle) + "," +
         format_number(r.y_statistic) + "\n";
  return out;
}

inline Json to_json(const EstimateRecord& r) {
  Json j;
  j["family"] = family_name(r.family);
  j["n"] = r.n;
  j["theta_hat"] = json_number(r.theta_hat);
  j["psi_hat_mle"] = json_number(r.psi_hat_mle);
  j["psi_hat_mcmle"] = json_number(r.psi_hat_mcmle);
  j["y_statistic"] = json_number(r.y_statistic);
  return j;
}

// ---- simulate ---------------------------------------------------------------

struct SimulationRow {
  const EstimatorSummary* summary = nullptr;
  const ComparisonRow* bias = nullptr;
  const ComparisonRow* variance = nullptr;
};

/// Row verdict: inconsistent if either check is, else the bias verdict.
inline Verdict row_verdict(const ComparisonRow& bias, const ComparisonRow& variance) {
  if (bias.verdict == Verdict::Inconsistent || variance.verdict == Verdict::Inconsistent) {
    return Verdict::Inconsistent;
  }
  if (variance.within_relative_tolerance && !*variance.within_relative_tolerance) return Verdict::Inconsistent;
  return bias.verdict;
}

inline std::vector<SimulationRow> simulation_rows(const SummaryTable& table, const ComparisonReport& cmp) {
  std::vector<SimulationRow> rows;
  for (const auto& s : table.rows) {
    rows.push_back({&s, cmp.find(s.estimator, Quantity::Bias), cmp.find(s.estimator, Quantity::Variance)});
  }
  return rows;
}

inline std::string simulation_csv(const SummaryTable& table, const ComparisonReport& cmp) {
  std::string out =
      "estimator,empirical_bias,bias_se,empirical_variance,variance_se,theory_bias,theory_variance,z_bias,verdict\n";
  for (const auto& row : simulation_rows(table, cmp)) {
    const auto& s = *row.summary;
    out += std::string(to_string(s.estimator)) + "," + format_number(s.empirical_bias) + "," +
           format_number(s.bias_se) + "," + format_number(s.empirical_variance) + "," +
           format_number(s.variance_se) + "," + format_number(row.bias->theory_value) + "," +
           format_number(row.variance->theory_value) + "," + format_number(row.bias->z_score) + "," +
           std::string(to_string(row_verdict(*row.bias, *row.variance))) + "\n";
  }
  return out;
}

inline Json to_json(const ExperimentConfig& c) {
  Json j;
  j["family"] = family_name(c.family);
  j["theta"] = json_number(c.theta);
  j["psi"] = json_number(c.psi);
  j["n"] = c.n;
  j["reps"] = c.replicates;
  j["seed"] = c.master_seed;
  Json est = Json::array();
  if (c.estimators.mle) est.push_back("mle");
  if (c.estimators.mcmle) est.push_back("mcmle");
  j["estimators"] = est;
  return j;
}

inline Json simulation_json(const SummaryTable& table, const ComparisonReport& cmp) {
  Json j;
  j["config"] = to_json(table.config);
  Json rows = Json::array();
  for (const auto& row : simulation_rows(table, cmp)) {
    const auto& s = *row.summary;
    Json r;
    r["estimator"] = to_string(s.estimator);
    r["empirical_bias"] = json_number(s.empirical_bias);
    r["bias_se"] = json_number(s.bias_se);
    r["empirical_variance"] = json_number(s.empirical_variance);
    r["variance_se"] = json_number(s.variance_se);
    r["theory_bias"] = json_number(row.bias->theory_value);
    r["theory_variance"] = json_number(row.variance->theory_value);
    r["z_bias"] = json_number(row.bias->z_score);
    r["verdict"] = to_string(row_verdict(*row.bias, *row.variance));
    r["replicates_used"] = s.replicates_used;
    r["degenerate_count"] = s.degenerate_count;
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  return j;
}

// ---- diagnose ---------------------------------------------------------------

inline Json to_json(const MeanWithSE& m) {
  return Json{{"mean", json_number(m.mean)},
              {"standard_error", json_number(m.standard_error)},
              {"replicates", m.replicates}};
}

inline Json to_json(const DiagnosticReport& r) {
  Json j;
  j["family"] = family_name(r.family);
  j["n"] = r.n;
  j["theta"] = json_number(r.theta);
  j["psi"] = json_number(r.psi);
  j["eu_true_theta"] = to_json(r.eu_true_theta);
  j["eu_plugin_theta"] = to_json(r.eu_plugin_theta);
  j["curvature"] = Json{{"kind", to_string(r.curvature.kind)},
                        {"constant_value", json_number(r.curvature.constant_value)}};
  j["predicted_bias_constant_c"] = json_number(r.predicted_bias_constant_c);
  j["predicted_bias_standard_error"] = json_number(r.predicted_bias_standard_error);
  if (r.taylor) {
    const auto& t = *r.taylor;
    j["taylor"] = Json{{"term1", json_number(t.decomposition.term1)},
                       {"term2", json_number(t.decomposition.term2)},
                       {"term3", json_number(t.decomposition.term3)},
                       {"sum", json_number(t.decomposition.sum)},
                       {"sum_standard_error", json_number(t.decomposition.sum_standard_error)},
                       {"moments", Json{{"eu", json_number(t.moments.eu)},
                                        {"ec", json_number(t.moments.ec)},
                                        {"cov_uc", json_number(t.moments.cov_uc)},
                                        {"var_c", json_number(t.moments.var_c)}}},
                       {"degenerate_count", t.degenerate_count}};
    j["direct_eu_over_c"] = to_json(t.direct_eu_over_c);
  } else {
    j["taylor"] = nullptr;
    j["direct_eu_over_c"] = nullptr;
  }
  return j;
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace mcmle::io
