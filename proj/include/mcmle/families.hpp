#pragma once

// Log-likelihoods, psi-scores, closed-form MLE / MCMLE and theoretical
// moments for the four parametrizations.
//
// Scores are the rescaled forms with constant factors dropped:
//
//   Normal               U = -n psi + sum (x_i - theta)^2
//   ShiftedExponential   U = -n psi + sum (x_i - theta)
//   ParetoShape          U =  n     - psi * sum log(x_i / theta)
//   ParetoInverseShape   U = -n psi + sum log(x_i / theta)
//
// The reduced statistic Y is the score's data term with theta replaced by its
// MLE.  The MCMLE solves the score of the exact law of Y:
//
//   Normal               Y ~ psi * chi2(n-1)        -> psi_mc = Y / (n-1)
//   ShiftedExponential   Y ~ Gamma(n-1, scale psi)  -> psi_mc = Y / (n-1)
//   ParetoShape          Y ~ Gamma(n-1, rate psi)   -> psi_mc = (n-1) / Y
//   ParetoInverseShape   Y ~ Gamma(n-1, scale psi*) -> psi_mc = Y / (n-1)

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>

#include "mcmle/error.hpp"
#include "mcmle/family_id.hpp"
#include "mcmle/sampling.hpp"

namespace mcmle {

struct ParamPair {
  double theta = 0.0;
  double psi = 1.0;
};

struct EstimateRecord {
  FamilyId family = FamilyId::Normal;
  double theta_hat = 0.0;
  double psi_hat_mle = 0.0;
  std::optional<double> psi_hat_mcmle;
  double y_statistic = 0.0;
  std::size_t n = 0;
};

enum class Provenance { PublishedClosedForm, DerivedClosedForm };

constexpr std::string_view to_string(Provenance p) noexcept {
  return p == Provenance::PublishedClosedForm ? "published-closed-form" : "derived-closed-form";
}

/// A closed-form moment; `value` is empty when the formula's denominator
/// vanishes or the moment does not exist at this n.
struct Moment {
  std::optional<double> value;
  Provenance provenance = Provenance::DerivedClosedForm;

  [[nodiscard]] bool available() const noexcept { return value.has_value(); }
};

struct TheoreticalMoments {
  FamilyId family = FamilyId::Normal;
  std::size_t n = 0;
  double psi = 0.0;
  Moment bias_mle;
  Moment var_mle;
  Moment bias_mcmle;
  Moment var_mcmle;
};

/// Default root bracket for psi-score equations.
struct Bracket {
  double lo = 1e-8;
  double hi = 1e8;
};

inline constexpr Bracket default_psi_bracket(FamilyId) noexcept { return {}; }

inline void validate_params(FamilyId family, const ParamPair& params) {
  if (!std::isfinite(params.theta) || !std::isfinite(params.psi)) {
    throw Error(ErrorCode::InvalidParams, "parameters must be finite");
  }
  if (!(params.psi > 0.0)) {
    throw Error(ErrorCode::InvalidParams,
                std::string(family_name(family)) + ": psi must be positive, got " + std::to_string(params.psi));
  }
  if (is_pareto(family) && !(params.theta > 0.0)) {
    throw Error(ErrorCode::InvalidParams,
                std::string(family_name(family)) + ": theta must be positive, got " + std::to_string(params.theta));
  }
}

namespace detail {

inline void require_nonempty(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::ZeroSize, "sample is empty");
}

inline void require_at_least_two(std::span<const double> values) {
  if (values.size() < 2) {
    throw Error(ErrorCode::TooFewObservations,
                "need at least 2 observations, got " + std::to_string(values.size()));
  }
}

inline double sample_min(std::span<const double> values) {
  return *std::min_element(values.begin(), values.end());
}

/// Mean computed about the first value so that a constant sample has a mean
/// exactly equal to that constant.
inline double shifted_mean(std::span<const double> values) {
  const double origin = values.front();
  double acc = 0.0;
  for (double x : values) acc += x - origin;
  return origin + acc / static_cast<double>(values.size());
}

inline void require_positive_values(FamilyId family, std::span<const double> values) {
  if (is_pareto(family) && !(sample_min(values) > 0.0)) {
    throw Error(ErrorCode::SupportViolation, "Pareto observations must be positive");
  }
}

inline double sum_log_ratio(std::span<const double> values, double theta) {
  double acc = 0.0;
  for (double x : values) acc += std::log(x / theta);
  return acc;
}

/// The score's data term at a given theta: sum (x-theta)^2, sum (x-theta) or
/// sum log(x/theta).
inline double data_term(FamilyId family, std::span<const double> values, double theta) {
  double acc = 0.0;
  switch (family) {
    case FamilyId::Normal:
      for (double x : values) acc += (x - theta) * (x - theta);
      return acc;
    case FamilyId::ShiftedExponential:
      for (double x : values) acc += x - theta;
      return acc;
    case FamilyId::ParetoShape:
    case FamilyId::ParetoInverseShape:
      return sum_log_ratio(values, theta);
  }
  return acc;
}

inline double pareto_shape_of(FamilyId family, double psi) {
  return family == FamilyId::ParetoInverseShape ? 1.0 / psi : psi;
}

}  // namespace detail

/// Full log-likelihood including normalizing constants.  Returns -inf when an
/// observation falls outside the support implied by theta.
inline double log_likelihood(FamilyId family, const ParamPair& params, std::span<const double> values) {
  detail::require_nonempty(values);
  validate_params(family, params);
  constexpr double kMinusInf = -std::numeric_limits<double>::infinity();
  const auto n = static_cast<double>(values.size());
  const double theta = params.theta;
  const double psi = params.psi;

  if (is_left_bounded(family) && theta > detail::sample_min(values)) return kMinusInf;

  switch (family) {
    case FamilyId::Normal: {
      const double ss = detail::data_term(family, values, theta);
      return -0.5 * n * std::log(2.0 * std::numbers::pi) - 0.5 * n * std::log(psi) - ss / (2.0 * psi);
    }
    case FamilyId::ShiftedExponential:
      return -n * std::log(psi) - detail::data_term(family, values, theta) / psi;
    case FamilyId::ParetoShape:
    case FamilyId::ParetoInverseShape: {
      const double shape = detail::pareto_shape_of(family, psi);
      double sum_log = 0.0;
      for (double x : values) sum_log += std::log(x);
      return n * std::log(shape) + n * shape * std::log(theta) - (shape + 1.0) * sum_log;
    }
  }
  return kMinusInf;
}

inline double log_likelihood(FamilyId family, const ParamPair& params, const SampleBatch& sample) {
  return log_likelihood(family, params, std::span<const double>(sample.values));
}

/// Rescaled psi-score.  theta may be the true value or the plug-in MLE.
inline double score_psi(FamilyId family, double theta, double psi, std::span<const double> values) {
  detail::require_nonempty(values);
  validate_params(family, {theta, psi});
  if (is_left_bounded(family) && theta > detail::sample_min(values)) {
    throw Error(ErrorCode::SupportViolation,
                std::string(family_name(family)) + ": theta exceeds the smallest observation");
  }
  const auto n = static_cast<double>(values.size());
  const double data = detail::data_term(family, values, theta);
  if (family == FamilyId::ParetoShape) return n - psi * data;
  return -n * psi + data;
}

inline double score_psi(FamilyId family, double theta, double psi, const SampleBatch& sample) {
  return score_psi(family, theta, psi, std::span<const double>(sample.values));
}

/// Analytic dU/dpsi of score_psi: -n, or -sum log(x/theta) for ParetoShape.
inline double score_psi_derivative(FamilyId family, double theta, double psi,
                                   std::span<const double> values) {
  detail::require_nonempty(values);
  validate_params(family, {theta, psi});
  if (family == FamilyId::ParetoShape) {
    if (theta > detail::sample_min(values)) {
      throw Error(ErrorCode::SupportViolation, "pareto-shape: theta exceeds the smallest observation");
    }
    return -detail::sum_log_ratio(values, theta);
  }
  return -static_cast<double>(values.size());
}

/// MLE of the nuisance parameter: the sample mean (Normal) or the minimum.
inline double theta_hat(FamilyId family, std::span<const double> values) {
  detail::require_nonempty(values);
  detail::require_positive_values(family, values);
  return family == FamilyId::Normal ? detail::shifted_mean(values) : detail::sample_min(values);
}

inline double y_statistic(FamilyId family, std::span<const double> values) {
  detail::require_at_least_two(values);
  return detail::data_term(family, values, theta_hat(family, values));
}

inline double y_statistic(FamilyId family, const SampleBatch& sample) {
  return y_statistic(family, std::span<const double>(sample.values));
}

/// Score of the exact law of Y, rescaled like score_psi.
inline double corrected_score(FamilyId family, double psi, double y, std::size_t n) {
  const auto m = static_cast<double>(n) - 1.0;
  if (family == FamilyId::ParetoShape) return m - psi * y;
  return -m * psi + y;
}

namespace detail {

inline EstimateRecord mle_from_y(FamilyId family, double theta_hat, double y, std::size_t n) {
  EstimateRecord rec;
  rec.family = family;
  rec.theta_hat = theta_hat;
  rec.y_statistic = y;
  rec.n = n;
  const auto nd = static_cast<double>(n);
  if (family == FamilyId::ParetoShape) {
    if (!(y > 0.0)) {
      throw Error(ErrorCode::DegenerateSample, "pareto-shape: Y = 0, all observations equal the minimum");
    }
    rec.psi_hat_mle = nd / y;
  } else {
    rec.psi_hat_mle = y / nd;
  }
  return rec;
}

inline double mcmle_from_y(FamilyId family, double y, std::size_t n) {
  const auto m = static_cast<double>(n) - 1.0;
  return family == FamilyId::ParetoShape ? m / y : y / m;
}

}  // namespace detail

/// Closed-form MLE; psi_hat_mcmle is left empty.
inline EstimateRecord mle(FamilyId family, std::span<const double> values) {
  detail::require_at_least_two(values);
  const double th = theta_hat(family, values);
  const double y = detail::data_term(family, values, th);
  return detail::mle_from_y(family, th, y, values.size());
}

inline EstimateRecord mle(FamilyId family, const SampleBatch& sample) {
  return mle(family, std::span<const double>(sample.values));
}

/// MLE plus the model-corrected estimate from the law of Y.
inline EstimateRecord mcmle(FamilyId family, std::span<const double> values) {
  EstimateRecord rec = mle(family, values);
  rec.psi_hat_mcmle = detail::mcmle_from_y(family, rec.y_statistic, rec.n);
  return rec;
}

inline EstimateRecord mcmle(FamilyId family, const SampleBatch& sample) {
  return mcmle(family, std::span<const double>(sample.values));
}

/// Closed-form bias and variance of psi_hat and psi_hat_mc at (n, psi).
inline TheoreticalMoments theoretical_moments(FamilyId family, std::size_t n, double psi) {
  if (n < 2) {
    throw Error(ErrorCode::TooFewObservations, "theoretical moments need n >= 2");
  }
  if (!(psi > 0.0) || !std::isfinite(psi)) {
    throw Error(ErrorCode::InvalidParams, "psi must be positive and finite");
  }
  TheoreticalMoments tm;
  tm.family = family;
  tm.n = n;
  tm.psi = psi;
  const auto nd = static_cast<double>(n);
  const double m = nd - 1.0;
  const double psi2 = psi * psi;
  constexpr auto kPublished = Provenance::PublishedClosedForm;
  constexpr auto kDerived = Provenance::DerivedClosedForm;

  switch (family) {
    case FamilyId::ParetoShape:
      // psi_hat = n/Y, psi_mc = (n-1)/Y, with E[1/Y] = psi/(n-2) and
      // E[1/Y^2] = psi^2/((n-2)(n-3)).
      tm.bias_mle = {n > 2 ? std::optional(2.0 * psi / (nd - 2.0)) : std::nullopt, kPublished};
      tm.bias_mcmle = {n > 2 ? std::optional(psi / (nd - 2.0)) : std::nullopt, kPublished};
      tm.var_mle = {n > 3 ? std::optional(nd * nd * psi2 / ((nd - 2.0) * (nd - 2.0) * (nd - 3.0)))
                          : std::nullopt,
                    kPublished};
      tm.var_mcmle = {n > 3 ? std::optional(m * m * psi2 / ((nd - 2.0) * (nd - 2.0) * (nd - 3.0)))
                            : std::nullopt,
                      kPublished};
      break;
    case FamilyId::ParetoInverseShape:
      // Y ~ Gamma(n-1, scale psi*): E Y = (n-1) psi*, Var Y = (n-1) psi*^2.
      tm.bias_mle = {-psi / nd, kDerived};
      tm.bias_mcmle = {0.0, kPublished};
      tm.var_mle = {n > 3 ? std::optional(m * psi2 / (nd * nd)) : std::nullopt, kDerived};
      tm.var_mcmle = {n > 3 ? std::optional(psi2 / m) : std::nullopt, kDerived};
      break;
    case FamilyId::Normal:
      // Y ~ psi chi2(n-1): E Y = (n-1) psi, Var Y = 2 (n-1) psi^2.
      tm.bias_mle = {-psi / nd, kDerived};
      tm.bias_mcmle = {0.0, kDerived};
      tm.var_mle = {2.0 * m * psi2 / (nd * nd), kDerived};
      tm.var_mcmle = {2.0 * psi2 / m, kDerived};
      break;
    case FamilyId::ShiftedExponential:
      // Y ~ Gamma(n-1, scale psi).
      tm.bias_mle = {-psi / nd, kDerived};
      tm.bias_mcmle = {0.0, kDerived};
      tm.var_mle = {m * psi2 / (nd * nd), kDerived};
      tm.var_mcmle = {psi2 / m, kDerived};
      break;
  }
  return tm;
}

}  // namespace mcmle
