#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mcmle/error.hpp"
#include "mcmle/families.hpp"
#include "mcmle/parallel.hpp"
#include "mcmle/sampling.hpp"
#include "mcmle/stats.hpp"

namespace mcmle {

enum class Estimator { Mle, Mcmle };

constexpr std::string_view to_string(Estimator e) noexcept { return e == Estimator::Mle ? "mle" : "mcmle"; }

constexpr std::optional<Estimator> parse_estimator(std::string_view s) noexcept {
  if (s == "mle") return Estimator::Mle;
  if (s == "mcmle") return Estimator::Mcmle;
  return std::nullopt;
}

struct EstimatorSet {
  bool mle = true;
  bool mcmle = true;

  [[nodiscard]] bool contains(Estimator e) const noexcept { return e == Estimator::Mle ? mle : mcmle; }
  [[nodiscard]] bool empty() const noexcept { return !mle && !mcmle; }
};

struct ExperimentConfig {
  FamilyId family = FamilyId::ParetoShape;
  double theta = 1.0;
  double psi = 1.0;
  std::size_t n = 10;
  std::size_t replicates = 1000;
  std::uint64_t master_seed = 0;
  EstimatorSet estimators;
};

inline void validate(const ExperimentConfig& cfg) {
  if (cfg.replicates < 2) {
    throw Error(ErrorCode::TooFewReplicates, "replicates must be at least 2, got " + std::to_string(cfg.replicates));
  }
  if (cfg.n < 2) throw Error(ErrorCode::TooFewObservations, "n must be at least 2, got " + std::to_string(cfg.n));
  if (cfg.estimators.empty()) throw Error(ErrorCode::InvalidArgument, "no estimators selected");
  validate_params(cfg.family, {cfg.theta, cfg.psi});
}

struct EstimatorSummary {
  Estimator estimator = Estimator::Mle;
  double empirical_mean = 0.0;
  double empirical_bias = 0.0;
  double bias_se = 0.0;
  double empirical_variance = 0.0;
  double variance_se = 0.0;
  std::size_t replicates_used = 0;
  std::size_t degenerate_count = 0;
};

struct SummaryTable {
  ExperimentConfig config;
  std::vector<EstimatorSummary> rows;

  [[nodiscard]] const EstimatorSummary* find(Estimator e) const noexcept {
    for (const auto& r : rows) {
      if (r.estimator == e) return &r;
    }
    return nullptr;
  }
};

namespace detail {

/// Variance SE from the fourth central moment: sqrt((m4 - s^4) / N).
inline EstimatorSummary summarize(Estimator e, std::span<const double> xs, double truth,
                                  std::size_t degenerate) {
  EstimatorSummary s;
  s.estimator = e;
  s.replicates_used = xs.size();
  s.degenerate_count = degenerate;
  const auto count = static_cast<double>(xs.size());
  s.empirical_mean = mean_of(xs);
  s.empirical_bias = s.empirical_mean - truth;
  s.empirical_variance = sample_variance(xs, s.empirical_mean);
  s.bias_se = std::sqrt(s.empirical_variance / count);
  const double m4 = central_moment(xs, s.empirical_mean, 4);
  const double s4 = s.empirical_variance * s.empirical_variance;
  s.variance_se = std::sqrt(std::max(0.0, m4 - s4) / count);
  return s;
}

}  // namespace detail

/// Replicate i samples from derive_substream(master_seed, i).  Per-replicate
/// estimates are stored by index and reduced serially, so the table is
/// bit-identical for every worker count.
inline SummaryTable run_experiment(const ExperimentConfig& cfg, unsigned workers = 1) {
  validate(cfg);
  const std::size_t reps = cfg.replicates;
  std::vector<double> mle_values(reps);
  std::vector<double> mcmle_values(reps);
  std::vector<char> degenerate(reps, 0);

  parallel_for(reps, workers, [&](std::size_t i) {
    RngStream stream = derive_substream(cfg.master_seed, i);
    const SampleBatch batch = sample_family(cfg.family, stream, cfg.theta, cfg.psi, cfg.n);
    try {
      const EstimateRecord rec = mcmle(cfg.family, batch);
      mle_values[i] = rec.psi_hat_mle;
      mcmle_values[i] = *rec.psi_hat_mcmle;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateSample) throw;
      degenerate[i] = 1;
    }
  });

  std::vector<double> kept_mle;
  std::vector<double> kept_mcmle;
  kept_mle.reserve(reps);
  kept_mcmle.reserve(reps);
  std::size_t n_degenerate = 0;
  for (std::size_t i = 0; i < reps; ++i) {
    if (degenerate[i]) {
      ++n_degenerate;
      continue;
    }
    kept_mle.push_back(mle_values[i]);
    kept_mcmle.push_back(mcmle_values[i]);
  }
  if (kept_mle.size() < 2) {
    throw Error(ErrorCode::AllReplicatesDegenerate,
                std::to_string(n_degenerate) + " of " + std::to_string(reps) + " replicates degenerate");
  }

  SummaryTable table;
  table.config = cfg;
  if (cfg.estimators.mle) table.rows.push_back(detail::summarize(Estimator::Mle, kept_mle, cfg.psi, n_degenerate));
  if (cfg.estimators.mcmle) {
    table.rows.push_back(detail::summarize(Estimator::Mcmle, kept_mcmle, cfg.psi, n_degenerate));
  }
  return table;
}

enum class Verdict { Consistent, Inconsistent, NoTheory };

constexpr std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::Consistent: return "consistent";
    case Verdict::Inconsistent: return "inconsistent";
    case Verdict::NoTheory: return "no-theory";
  }
  return "unknown";
}

enum class Quantity { Bias, Variance };

constexpr std::string_view to_string(Quantity q) noexcept { return q == Quantity::Bias ? "bias" : "variance"; }

/// |z| threshold for a consistent verdict.
inline constexpr double kConsistencyZ = 4.0;
/// Relative tolerance on variance once replicates reach kRelativeCheckReplicates.
inline constexpr double kVarianceRelTol = 0.05;
inline constexpr std::size_t kRelativeCheckReplicates = 100000;

struct ComparisonRow {
  Estimator estimator = Estimator::Mle;
  Quantity quantity = Quantity::Bias;
  std::optional<double> theory_value;
  double empirical_value = 0.0;
  double standard_error = 0.0;
  std::optional<double> z_score;
  Verdict verdict = Verdict::NoTheory;
  /// Variance rows only: |empirical - theory| / theory.
  std::optional<double> relative_error;
  /// Variance rows with at least kRelativeCheckReplicates replicates.
  std::optional<bool> within_relative_tolerance;
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;

  [[nodiscard]] const ComparisonRow* find(Estimator e, Quantity q) const noexcept {
    for (const auto& r : rows) {
      if (r.estimator == e && r.quantity == q) return &r;
    }
    return nullptr;
  }
};

namespace detail {

inline ComparisonRow compare_one(Estimator e, Quantity q, const Moment& theory, double empirical, double se) {
  ComparisonRow row;
  row.estimator = e;
  row.quantity = q;
  row.empirical_value = empirical;
  row.standard_error = se;
  row.theory_value = theory.value;
  if (!theory.value) {
    row.verdict = Verdict::NoTheory;
    return row;
  }
  const double diff = empirical - *theory.value;
  if (se > 0.0) {
    row.z_score = diff / se;
  } else {
    row.z_score = diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
  }
  row.verdict = std::abs(*row.z_score) <= kConsistencyZ ? Verdict::Consistent : Verdict::Inconsistent;
  return row;
}

}  // namespace detail

/// z-scores of empirical bias and variance against closed forms, plus the
/// relative variance check for large runs.
inline ComparisonReport compare_to_theory(const SummaryTable& summary, const TheoreticalMoments& theory) {
  const ExperimentConfig& cfg = summary.config;
  if (cfg.family != theory.family || cfg.n != theory.n || cfg.psi != theory.psi) {
    throw Error(ErrorCode::MismatchedConfig, "summary and theory differ in family, n or psi");
  }
  ComparisonReport report;
  for (const EstimatorSummary& s : summary.rows) {
    const bool is_mle = s.estimator == Estimator::Mle;
    const Moment& bias = is_mle ? theory.bias_mle : theory.bias_mcmle;
    const Moment& var = is_mle ? theory.var_mle : theory.var_mcmle;
    report.rows.push_back(detail::compare_one(s.estimator, Quantity::Bias, bias, s.empirical_bias, s.bias_se));
    ComparisonRow vrow =
        detail::compare_one(s.estimator, Quantity::Variance, var, s.empirical_variance, s.variance_se);
    if (var.value && *var.value != 0.0) {
      vrow.relative_error = std::abs(s.empirical_variance - *var.value) / std::abs(*var.value);
      if (s.replicates_used >= kRelativeCheckReplicates) {
        vrow.within_relative_tolerance = *vrow.relative_error <= kVarianceRelTol;
      }
    }
    report.rows.push_back(vrow);
  }
  return report;
}

}  // namespace mcmle
