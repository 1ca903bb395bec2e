#pragma once

// Fixed-order reductions over per-replicate values.  Every function walks its
// input front to back, so results depend only on the values, never on how
// they were produced.

#include <cmath>
#include <cstddef>
#include <span>
#include <string>

#include "mcmle/error.hpp"

namespace mcmle {

struct MeanWithSE {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t replicates = 0;
};

inline double mean_of(std::span<const double> xs) {
  double acc = 0.0;
  for (double x : xs) acc += x;
  return acc / static_cast<double>(xs.size());
}

/// (1/N) sum (x - center)^k
inline double central_moment(std::span<const double> xs, double center, int k) {
  double acc = 0.0;
  for (double x : xs) acc += std::pow(x - center, k);
  return acc / static_cast<double>(xs.size());
}

/// Unbiased sample variance (N - 1 divisor).
inline double sample_variance(std::span<const double> xs, double mean) {
  double acc = 0.0;
  for (double x : xs) acc += (x - mean) * (x - mean);
  return acc / static_cast<double>(xs.size() - 1);
}

/// (1/N) sum (x - mx)(y - my)
inline double covariance(std::span<const double> xs, double mx, std::span<const double> ys, double my) {
  double acc = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) acc += (xs[i] - mx) * (ys[i] - my);
  return acc / static_cast<double>(xs.size());
}

/// Mean with standard error sample_sd / sqrt(N).
inline MeanWithSE mean_with_se(std::span<const double> xs) {
  if (xs.size() < 2) {
    throw Error(ErrorCode::TooFewReplicates, "need at least 2 values, got " + std::to_string(xs.size()));
  }
  MeanWithSE out;
  out.replicates = xs.size();
  out.mean = mean_of(xs);
  out.standard_error = std::sqrt(sample_variance(xs, out.mean) / static_cast<double>(xs.size()));
  return out;
}

}  // namespace mcmle
