#pragma once

// Numerical solutions of the plug-in and corrected score equations, used to
// cross-check the closed-form estimators.

#include <span>

#include "mcmle/families.hpp"
#include "mcmle/solver.hpp"

namespace mcmle {

/// Root in psi of score_psi(family, theta_hat, psi, x).
inline RootResult numeric_mle(FamilyId family, std::span<const double> values, SolverOptions opts = {}) {
  const double th = theta_hat(family, values);
  const Bracket b = default_psi_bracket(family);
  return solve_score_root([&](double psi) { return score_psi(family, th, psi, values); }, b.lo, b.hi, opts);
}

/// Root in psi of corrected_score(family, psi, Y, n).
inline RootResult numeric_mcmle(FamilyId family, std::span<const double> values, SolverOptions opts = {}) {
  const double y = y_statistic(family, values);
  const std::size_t n = values.size();
  const Bracket b = default_psi_bracket(family);
  return solve_score_root([&](double psi) { return corrected_score(family, psi, y, n); }, b.lo, b.hi, opts);
}

}  // namespace mcmle
