#pragma once

// Executable form of the bias-pathology argument for two-parameter models.
//
// With theta known the psi-score has mean zero.  Plugging in theta_hat shifts
// that mean, and when the score's psi-curvature C is a nonzero constant the
// MLE bias is exactly -E[U(x, theta_hat, psi)] / C.  When C depends on the
// data the bias is -E[U/C], which is compared here against the three-term
// expansion  EU/EC - Cov(U,C)/EC^2 + Var(C) EU/EC^3.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mcmle/error.hpp"
#include "mcmle/families.hpp"
#include "mcmle/parallel.hpp"
#include "mcmle/sampling.hpp"
#include "mcmle/stats.hpp"

namespace mcmle {

enum class CurvatureKind { ConstantC, DataDependentC };

constexpr std::string_view to_string(CurvatureKind k) noexcept {
  return k == CurvatureKind::ConstantC ? "constant" : "data-dependent";
}

struct CurvatureClass {
  CurvatureKind kind = CurvatureKind::ConstantC;
  /// Present iff kind == ConstantC.
  std::optional<double> constant_value;
};

struct TaylorMoments {
  double eu = 0.0;
  double ec = 0.0;
  double cov_uc = 0.0;
  double var_c = 0.0;
};

struct TaylorDecomposition {
  double term1 = 0.0;  ///< EU / EC
  double term2 = 0.0;  ///< -Cov(U, C) / EC^2
  double term3 = 0.0;  ///< Var(C) EU / EC^3
  double sum = 0.0;
  /// Delta-method standard error of `sum` when estimated from replicates.
  double sum_standard_error = 0.0;
};

struct TaylorResult {
  TaylorDecomposition decomposition;
  TaylorMoments moments;
  MeanWithSE direct_eu_over_c;
  std::size_t degenerate_count = 0;
};

struct DiagnosticReport {
  FamilyId family = FamilyId::Normal;
  std::size_t n = 0;
  double theta = 0.0;
  double psi = 0.0;
  MeanWithSE eu_true_theta;
  MeanWithSE eu_plugin_theta;
  CurvatureClass curvature;
  std::optional<double> predicted_bias_constant_c;
  std::optional<double> predicted_bias_standard_error;
  std::optional<TaylorResult> taylor;
};

/// Threshold, in standard errors, for calling a mean nonzero.
inline constexpr double kPathologyZ = 4.0;

namespace detail {

inline void require_diag_inputs(FamilyId family, double theta, double psi, std::size_t n) {
  validate_params(family, {theta, psi});
  if (n < 2) throw Error(ErrorCode::TooFewObservations, "n must be at least 2");
}

}  // namespace detail

/// Monte Carlo mean of U_psi(X, theta', psi) at the true psi, with theta' the
/// true theta (plugin = false) or theta_hat(X) (plugin = true).  Replicate i
/// draws from derive_substream(master_seed, i).
inline MeanWithSE estimate_score_mean(FamilyId family, double theta, double psi, std::size_t n,
                                      std::size_t replicates, bool plugin, std::uint64_t master_seed,
                                      unsigned workers = 1) {
  detail::require_diag_inputs(family, theta, psi, n);
  if (replicates < 100) {
    throw Error(ErrorCode::TooFewReplicates, "score mean needs at least 100 replicates");
  }
  std::vector<double> scores(replicates);
  parallel_for(replicates, workers, [&](std::size_t i) {
    RngStream stream = derive_substream(master_seed, i);
    const SampleBatch batch = sample_family(family, stream, theta, psi, n);
    const double at = plugin ? theta_hat(family, batch.values) : theta;
    scores[i] = score_psi(family, at, psi, batch.values);
  });
  return mean_with_se(scores);
}

inline CurvatureClass curvature_class(FamilyId family, std::size_t n) {
  if (family == FamilyId::ParetoShape) return {CurvatureKind::DataDependentC, std::nullopt};
  return {CurvatureKind::ConstantC, -static_cast<double>(n)};
}

/// -eu / c.
inline double predicted_bias_constant_c(double eu, double c) {
  if (c == 0.0) throw Error(ErrorCode::ZeroCurvature, "curvature C must be nonzero");
  return -eu / c;
}

/// Three-term approximation of E[U/C] from the four population moments.
inline TaylorDecomposition taylor_terms_from_moments(const TaylorMoments& m) {
  if (m.ec == 0.0) throw Error(ErrorCode::ZeroCurvature, "E C must be nonzero");
  TaylorDecomposition d;
  const double ec2 = m.ec * m.ec;
  d.term1 = m.eu / m.ec;
  d.term2 = -m.cov_uc / ec2;
  d.term3 = m.var_c * m.eu / (ec2 * m.ec);
  d.sum = d.term1 + d.term2 + d.term3;
  return d;
}

/// Monte Carlo estimates of EU, EC, Cov(U,C), Var(C) with U = U_psi(X,
/// theta_hat, psi) and C = dU/dpsi at the true psi, the resulting
/// decomposition, and the direct estimate of E[U/C].  The MLE bias is
/// approximately -E[U/C].  Replicates with C = 0 are dropped and counted.
///
/// Constant-curvature families are rejected unless `force` is set.
inline TaylorResult taylor_bias_terms(FamilyId family, double theta, double psi, std::size_t n,
                                      std::size_t replicates, std::uint64_t master_seed,
                                      unsigned workers = 1, bool force = false) {
  detail::require_diag_inputs(family, theta, psi, n);
  if (replicates < 1000) {
    throw Error(ErrorCode::TooFewReplicates, "Taylor decomposition needs at least 1000 replicates");
  }
  if (!force && curvature_class(family, n).kind == CurvatureKind::ConstantC) {
    throw Error(ErrorCode::NotApplicable,
                std::string(family_name(family)) + " has constant curvature; pass force to evaluate anyway");
  }

  std::vector<double> us(replicates);
  std::vector<double> cs(replicates);
  parallel_for(replicates, workers, [&](std::size_t i) {
    RngStream stream = derive_substream(master_seed, i);
    const SampleBatch batch = sample_family(family, stream, theta, psi, n);
    const double th = theta_hat(family, batch.values);
    us[i] = score_psi(family, th, psi, batch.values);
    cs[i] = score_psi_derivative(family, th, psi, batch.values);
  });

  TaylorResult out;
  std::vector<double> u_kept;
  std::vector<double> c_kept;
  std::vector<double> ratio;
  u_kept.reserve(replicates);
  c_kept.reserve(replicates);
  ratio.reserve(replicates);
  for (std::size_t i = 0; i < replicates; ++i) {
    if (cs[i] == 0.0) {
      ++out.degenerate_count;
      continue;
    }
    u_kept.push_back(us[i]);
    c_kept.push_back(cs[i]);
    ratio.push_back(us[i] / cs[i]);
  }
  if (u_kept.size() < 2) {
    throw Error(ErrorCode::AllReplicatesDegenerate, "fewer than 2 replicates with nonzero curvature");
  }

  TaylorMoments& m = out.moments;
  m.eu = mean_of(u_kept);
  m.ec = mean_of(c_kept);
  m.cov_uc = covariance(u_kept, m.eu, c_kept, m.ec);
  m.var_c = covariance(c_kept, m.ec, c_kept, m.ec);
  out.decomposition = taylor_terms_from_moments(m);
  out.direct_eu_over_c = mean_with_se(ratio);

  // Delta method.  Writing p = E[UC] and q = E[C^2], the sum equals
  // g(a, b, p, q) = a/b - p/b^2 + a q/b^3 with a = EU, b = EC.
  const double a = m.eu;
  const double b = m.ec;
  const double p = m.cov_uc + a * b;
  const double q = m.var_c + b * b;
  const double b2 = b * b;
  const double b3 = b2 * b;
  const double ga = 1.0 / b + q / b3;
  const double gb = -a / b2 + 2.0 * p / b3 - 3.0 * a * q / (b3 * b);
  const double gp = -1.0 / b2;
  const double gq = a / b3;
  std::vector<double> influence(u_kept.size());
  for (std::size_t i = 0; i < u_kept.size(); ++i) {
    const double u = u_kept[i];
    const double c = c_kept[i];
    influence[i] = ga * (u - a) + gb * (c - b) + gp * (u * c - p) + gq * (c * c - q);
  }
  out.decomposition.sum_standard_error = mean_with_se(influence).standard_error;
  return out;
}

/// Full report: regularity vs plug-in score means, curvature class, and the
/// bias prediction appropriate to that class.
inline DiagnosticReport diagnose(FamilyId family, double theta, double psi, std::size_t n,
                                 std::size_t replicates, std::uint64_t master_seed, unsigned workers = 1) {
  DiagnosticReport r;
  r.family = family;
  r.n = n;
  r.theta = theta;
  r.psi = psi;
  r.eu_true_theta = estimate_score_mean(family, theta, psi, n, replicates, false, master_seed, workers);
  r.eu_plugin_theta = estimate_score_mean(family, theta, psi, n, replicates, true, master_seed, workers);
  r.curvature = curvature_class(family, n);
  if (r.curvature.kind == CurvatureKind::ConstantC) {
    const double c = *r.curvature.constant_value;
    r.predicted_bias_constant_c = predicted_bias_constant_c(r.eu_plugin_theta.mean, c);
    r.predicted_bias_standard_error = r.eu_plugin_theta.standard_error / std::abs(c);
  } else {
    r.taylor = taylor_bias_terms(family, theta, psi, n, replicates,
                                 master_seed, workers);
  }
  return r;
}

}  // namespace mcmle
