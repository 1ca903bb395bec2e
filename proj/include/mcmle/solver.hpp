#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>

#include "mcmle/error.hpp"

namespace mcmle {

enum class RootMethod { Newton, BisectionFallback };

constexpr std::string_view to_string(RootMethod m) noexcept {
  return m == RootMethod::Newton ? "newton" : "bisection-fallback";
}

struct RootResult {
  double root = 0.0;
  double residual = 0.0;
  std::size_t iterations = 0;
  /// BisectionFallback if any iteration had to bisect.
  RootMethod method_used = RootMethod::Newton;
};

struct SolverOptions {
  double tol = 1e-12;
  std::size_t max_iter = 200;
};

inline double default_step(double x) noexcept { return 1e-6 * std::max(1.0, std::abs(x)); }

/// Central difference (f(x+h) - f(x-h)) / (2h).
template <typename F>
double numeric_derivative(F&& f, double x, double h) {
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "step h must be positive");
  const double up = f(x + h);
  const double down = f(x - h);
  if (!std::isfinite(up) || !std::isfinite(down)) {
    throw Error(ErrorCode::NonFiniteEvaluation, "f is not finite at x +/- h (x = " + std::to_string(x) + ")");
  }
  return (up - down) / (2.0 * h);
}

template <typename F>
double numeric_derivative(F&& f, double x) {
  return numeric_derivative(std::forward<F>(f), x, default_step(x));
}

/// Safeguarded Newton on [lo, hi].
///
/// Starts at the bracket midpoint and takes Newton steps with a central
/// difference derivative.  The sign-change bracket is tightened after every
/// evaluation; a step that leaves it (or a flat derivative) is replaced by a
/// bisection step, so the iteration always converges.
template <typename F>
RootResult solve_score_root(F&& f, double lo, double hi, SolverOptions opts = {}) {
  if (!(opts.tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tol must be positive");
  if (!(lo < hi)) throw Error(ErrorCode::InvalidArgument, "bracket must satisfy lo < hi");

  double f_lo = f(lo);
  double f_hi = f(hi);
  if (!std::isfinite(f_lo) || !std::isfinite(f_hi)) {
    throw Error(ErrorCode::NonFiniteEvaluation, "f is not finite at the bracket ends");
  }
  if (std::abs(f_lo) <= opts.tol) return {lo, f_lo, 0, RootMethod::Newton};
  if (std::abs(f_hi) <= opts.tol) return {hi, f_hi, 0, RootMethod::Newton};
  if ((f_lo > 0.0) == (f_hi > 0.0)) {
    throw Error(ErrorCode::NoSignChange, "f(lo) and f(hi) have the same sign");
  }

  RootResult result;
  double x = 0.5 * (lo + hi);
  for (std::size_t iter = 1; iter <= opts.max_iter; ++iter) {
    const double fx = f(x);
    if (!std::isfinite(fx)) {
      throw Error(ErrorCode::NonFiniteEvaluation, "f is not finite inside the bracket");
    }
    result.iterations = iter;
    if (std::abs(fx) <= opts.tol) {
      result.root = x;
      result.residual = fx;
      return result;
    }
    // Derivative probes stay strictly inside the current bracket.
    double slope = 0.0;
    const double h = std::min({default_step(x), x - lo, hi - x});
    if (h > 0.0) slope = numeric_derivative(f, x, h);

    if ((fx > 0.0) == (f_lo > 0.0)) {
      lo = x;
      f_lo = fx;
    } else {
      hi = x;
      f_hi = fx;
    }

    double next = x;
    bool newton_ok = false;
    if (slope != 0.0 && std::isfinite(slope)) {
      next = x - fx / slope;
      newton_ok = next > lo && next < hi;
    }
    if (!newton_ok) {
      next = 0.5 * (lo + hi);
      result.method_used = RootMethod::BisectionFallback;
    }
    if (next == x || next <= lo || next >= hi) {
      // The bracket has collapsed to adjacent doubles without meeting tol.
      const double f_next = f(next);
      if (std::abs(f_next) <= opts.tol) return {next, f_next, iter, result.method_used};
      throw Error(ErrorCode::MaxIterationsExceeded,
                  "bracket collapsed before |f| <= tol (|f| = " + std::to_string(std::abs(f_next)) + ")");
    }
    x = next;
  }
  throw Error(ErrorCode::MaxIterationsExceeded,
              "no root within " + std::to_string(opts.max_iter) + " iterations");
}

}  // namespace mcmle
