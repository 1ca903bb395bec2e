#pragma once

// Command-line front end.
//
//   estimate --family F --data PATH [--out PATH] [--format csv|json]
//   simulate --family F --theta T --psi P --n N --reps R [--seed S]
//            [--estimators mle,mcmle] [--workers W] [--out PATH] [--format csv|json]
//   diagnose --family F --theta T --psi P --n N --reps R [--seed S] [--workers W] [--out PATH]
//
// Every subcommand also takes --config PATH, a JSON object with the keys
// family, theta, psi, n, reps, seed, estimators, out, format, workers (and
// data for estimate).  Flags given on the command line override the file.
//
// Exit status: 0 success, 1 runtime failure, 2 usage or validation error.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mcmle/diagnostics.hpp"
#include "mcmle/error.hpp"
#include "mcmle/families.hpp"
#include "mcmle/io.hpp"
#include "mcmle/montecarlo.hpp"
#include "mcmle/parallel.hpp"

namespace mcmle::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

enum class Command { Estimate, Simulate, Diagnose };

enum class Format { Csv, Json };

/// A usage or validation problem, tied to the flag (or config key) at fault.
class UsageError : public std::runtime_error {
 public:
  UsageError(std::string flag, const std::string& reason)
      : std::runtime_error(reason + " (" + flag + ")"), flag_(std::move(flag)) {}

  [[nodiscard]] const std::string& flag() const noexcept { return flag_; }

 private:
  std::string flag_;
};

/// Raw settings after merging the config file and flags, before validation.
struct Settings {
  std::optional<std::string> family;
  std::optional<double> theta;
  std::optional<double> psi;
  std::optional<std::uint64_t> n;
  std::optional<std::uint64_t> reps;
  std::optional<std::uint64_t> seed;
  std::optional<EstimatorSet> estimators;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<std::uint64_t> workers;
  std::optional<std::string> data;
};

/// A fully validated invocation.
struct CliCommand {
  Command command = Command::Simulate;
  ExperimentConfig experiment;
  std::string data_path;
  std::optional<std::string> out;
  Format format = Format::Csv;
  unsigned workers = 1;
};

namespace detail {

inline double parse_real(const std::string& text, const std::string& flag) {
  std::string_view sv = text;
  if (sv.size() > 1 && sv.front() == '+') sv.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), v);
  if (ec != std::errc{} || ptr != sv.data() + sv.size() || !std::isfinite(v)) {
    throw UsageError(flag, "expected a finite number, got '" + text + "'");
  }
  return v;
}

inline std::uint64_t parse_count(const std::string& text, const std::string& flag) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw UsageError(flag, "expected a non-negative integer, got '" + text + "'");
  }
  return v;
}

inline EstimatorSet parse_estimator_list(const std::vector<std::string>& names, const std::string& flag) {
  EstimatorSet set{false, false};
  for (const auto& name : names) {
    const auto e = parse_estimator(name);
    if (!e) throw UsageError(flag, "unknown estimator '" + name + "' (expected mle or mcmle)");
    (*e == Estimator::Mle ? set.mle : set.mcmle) = true;
  }
  if (set.empty()) throw UsageError(flag, "at least one estimator is required");
  return set;
}

inline std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

inline Settings load_config(const std::string& path) {
  const std::string flag = "--config";
  std::ifstream in(path);
  if (!in) throw UsageError(flag, "cannot open config file '" + path + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(flag, std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw UsageError(flag, "config must be a JSON object");

  Settings s;
  for (const auto& [key, value] : doc.items()) {
    const std::string where = "config key '" + key + "'";
    auto need_string = [&]() -> std::string {
      if (!value.is_string()) throw UsageError(where, "expected a string");
      return value.get<std::string>();
    };
    auto need_real = [&]() -> double {
      if (!value.is_number()) throw UsageError(where, "expected a number");
      return value.get<double>();
    };
    auto need_count = [&]() -> std::uint64_t {
      if (!value.is_number_unsigned()) throw UsageError(where, "expected a non-negative integer");
      return value.get<std::uint64_t>();
    };
    if (key == "family") {
      s.family = need_string();
    } else if (key == "theta") {
      s.theta = need_real();
    } else if (key == "psi") {
      s.psi = need_real();
    } else if (key == "n") {
      s.n = need_count();
    } else if (key == "reps") {
      s.reps = need_count();
    } else if (key == "seed") {
      s.seed = need_count();
    } else if (key == "workers") {
      s.workers = need_count();
    } else if (key == "out") {
      s.out = need_string();
    } else if (key == "format") {
      s.format = need_string();
    } else if (key == "data") {
      s.data = need_string();
    } else if (key == "estimators") {
      std::vector<std::string> names;
      if (value.is_string()) {
        names = split_commas(value.get<std::string>());
      } else if (value.is_array()) {
        for (const auto& v : value) {
          if (!v.is_string()) throw UsageError(where, "expected an array of strings");
          names.push_back(v.get<std::string>());
        }
      } else {
        throw UsageError(where, "expected a string or an array of strings");
      }
      s.estimators = parse_estimator_list(names, where);
    } else {
      throw UsageError(where, "unknown key");
    }
  }
  return s;
}

inline Format resolve_format(const Settings& s, Format fallback) {
  if (s.format) {
    if (*s.format == "csv") return Format::Csv;
    if (*s.format == "json") return Format::Json;
    throw UsageError("--format", "expected csv or json, got '" + *s.format + "'");
  }
  if (s.out && std::filesystem::path(*s.out).extension() == ".json") return Format::Json;
  return fallback;
}

template <typename T>
const T& require(const std::optional<T>& v, const std::string& flag) {
  if (!v) throw UsageError(flag, "missing required value");
  return *v;
}

inline CliCommand validate(Command command, const Settings& s) {
  CliCommand cmd;
  cmd.command = command;
  cmd.out = s.out;

  const std::string& fam_name = require(s.family, "--family");
  const auto family = parse_family(fam_name);
  if (!family) {
    throw UsageError("--family", "invalid family '" + fam_name +
                                     "' (expected normal, shifted-exp, pareto-shape or pareto-inverse-shape)");
  }
  ExperimentConfig& exp = cmd.experiment;
  exp.family = *family;

  if (command == Command::Estimate) {
    cmd.data_path = require(s.data, "--data");
    cmd.format = resolve_format(s, Format::Csv);
    return cmd;
  }

  exp.theta = require(s.theta, "--theta");
  exp.psi = require(s.psi, "--psi");
  exp.n = require(s.n, "--n");
  exp.replicates = require(s.reps, "--reps");
  exp.master_seed = s.seed.value_or(0);
  if (s.estimators) exp.estimators = *s.estimators;

  if (!(exp.psi > 0.0)) throw UsageError("--psi", "psi must be positive for " + fam_name);
  if (is_pareto(exp.family) && !(exp.theta > 0.0)) {
    throw UsageError("--theta", "theta must be positive for " + fam_name);
  }
  if (exp.n < 2) throw UsageError("--n", "n must be at least 2");

  std::size_t min_reps = 2;
  if (command == Command::Diagnose) {
    min_reps = exp.family == FamilyId::ParetoShape ? 1000 : 100;
  }
  if (exp.replicates < min_reps) {
    throw UsageError("--reps", "reps must be at least " + std::to_string(min_reps));
  }

  const std::uint64_t w = s.workers.value_or(0);
  if (w > 4096) throw UsageError("--workers", "at most 4096 workers");
  cmd.workers = w == 0 ? default_workers() : static_cast<unsigned>(w);

  cmd.format = resolve_format(s, command == Command::Diagnose ? Format::Json : Format::Csv);
  if (command == Command::Diagnose && cmd.format != Format::Json) {
    throw UsageError("--format", "diagnose only emits json");
  }
  return cmd;
}

inline std::string render(const CliCommand& cmd) {
  const ExperimentConfig& exp = cmd.experiment;
  switch (cmd.command) {
    case Command::Estimate: {
      const auto values = io::read_sample_file(cmd.data_path);
      const EstimateRecord rec = mcmle(exp.family, values);
      return cmd.format == Format::Json ? io::dump(io::to_json(rec)) : io::estimate_csv(rec);
    }
    case Command::Simulate: {
      const SummaryTable table = run_experiment(exp, cmd.workers);
      const TheoreticalMoments theory = theoretical_moments(exp.family, exp.n, exp.psi);
      const ComparisonReport cmp = compare_to_theory(table, theory);
      return cmd.format == Format::Json ? io::dump(io::simulation_json(table, cmp))
                                        : io::simulation_csv(table, cmp);
    }
    case Command::Diagnose: {
      const DiagnosticReport report =
          diagnose(exp.family, exp.theta, exp.psi, exp.n, exp.replicates, exp.master_seed, cmd.workers);
      return io::dump(io::to_json(report));
    }
  }
  return {};
}

}  // namespace detail

/// Parses `args` (without the program name) into a validated command.
/// Throws UsageError or CLI::ParseError.
inline CliCommand parse_command(const std::vector<std::string>& args, CLI::App& app) {
  struct Raw {
    std::string family, data, out, format, config, theta, psi, n, reps, seed, workers, estimators;
  } raw;

  app.require_subcommand(1, 1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  auto* estimate = app.add_subcommand("estimate", "Estimate theta, psi (MLE) and psi (MCMLE) from a data file");
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo bias/variance of MLE and MCMLE against closed forms");
  auto* diagnose_cmd = app.add_subcommand("diagnose", "Score-mean regularity vs plug-in pathology diagnostics");

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--family", raw.family, "normal | shifted-exp | pareto-shape | pareto-inverse-shape");
    sub->add_option("--out", raw.out, "Output path (default: stdout)");
    sub->add_option("--format", raw.format, "csv | json");
    sub->add_option("--config", raw.config, "JSON file with default values for the flags");
  };
  auto add_experiment = [&](CLI::App* sub) {
    sub->add_option("--theta", raw.theta, "True theta");
    sub->add_option("--psi", raw.psi, "True psi");
    sub->add_option("--n", raw.n, "Sample size per replicate");
    sub->add_option("--reps", raw.reps, "Number of replicates");
    sub->add_option("--seed", raw.seed, "Master seed");
    sub->add_option("--workers", raw.workers, "Worker threads (0 = all cores)");
  };
  add_common(estimate);
  estimate->add_option("--data", raw.data, "CSV with a `value` column, or whitespace-separated numbers");
  add_common(simulate);
  add_experiment(simulate);
  simulate->add_option("--estimators", raw.estimators, "Comma-separated subset of mle,mcmle");
  add_common(diagnose_cmd);
  add_experiment(diagnose_cmd);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  app.parse(reversed);

  CLI::App* active = estimate->parsed() ? estimate : (simulate->parsed() ? simulate : diagnose_cmd);
  const Command command = active == estimate   ? Command::Estimate
                          : active == simulate ? Command::Simulate
                                               : Command::Diagnose;
  auto given = [&](const char* flag) {
    const auto* opt = active->get_option_no_throw(flag);
    return opt != nullptr && opt->count() > 0;
  };

  Settings s = given("--config") ? detail::load_config(raw.config) : Settings{};
  if (command != Command::Estimate && s.data) throw UsageError("config key 'data'", "only valid for estimate");
  if (given("--family")) s.family = raw.family;
  if (given("--data")) s.data = raw.data;
  if (given("--out")) s.out = raw.out;
  if (given("--format")) s.format = raw.format;
  if (given("--theta")) s.theta = detail::parse_real(raw.theta, "--theta");
  if (given("--psi")) s.psi = detail::parse_real(raw.psi, "--psi");
  if (given("--n")) s.n = detail::parse_count(raw.n, "--n");
  if (given("--reps")) s.reps = detail::parse_count(raw.reps, "--reps");
  if (given("--seed")) s.seed = detail::parse_count(raw.seed, "--seed");
  if (given("--workers")) s.workers = detail::parse_count(raw.workers, "--workers");
  if (given("--estimators")) {
    s.estimators = detail::parse_estimator_list(detail::split_commas(raw.estimators), "--estimators");
  }
  return detail::validate(command, s);
}

/// Runs one invocation.  `args` excludes the program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bias diagnostics for MLE and model-corrected MLE", "mcmle"};
  CliCommand cmd;
  try {
    cmd = parse_command(args, app);
  } catch (const CLI::CallForHelp&) {
    const auto active = app.get_subcommands();
    out << (active.empty() ? app.help() : active.front()->help());
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    const std::string text = detail::render(cmd);
    if (cmd.out) {
      io::write_atomic(*cmd.out, text);
    } else {
      out << text;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace mcmle::cli
