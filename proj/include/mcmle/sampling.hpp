#pragma once

// Counter-based random streams and inverse-CDF samplers.
//
// Uniform consumption is fixed: every variate of every sampler (including the
// normal and gamma samplers) consumes exactly one uniform, in order.  A
// uniform is built from one 64-bit half of a Philox4x32-10 output block, so
// one block yields two uniforms.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "mcmle/error.hpp"
#include "mcmle/family_id.hpp"

namespace mcmle {

namespace detail {

/// Philox4x32 with 10 rounds (Salmon et al., "Parallel random numbers: as
/// easy as 1, 2, 3").
inline std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                                  std::array<std::uint32_t, 2> key) noexcept {
  constexpr std::uint32_t kMul0 = 0xD2511F53u;
  constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
    const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

/// Maps 64 random bits to the open interval (0, 1).
constexpr double bits_to_open_unit(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

}  // namespace detail

/// A deterministic stream of uniforms keyed by (master_seed, stream_index).
///
/// Output block k of the stream is Philox(counter = (k, stream_index),
/// key = master_seed).  Streams are cheap values; copying one forks it at its
/// current position.  A single stream must not be drawn from concurrently.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_index) noexcept
      : master_seed_(master_seed), stream_index_(stream_index) {}

  [[nodiscard]] std::uint64_t master_seed() const noexcept { return master_seed_; }
  [[nodiscard]] std::uint64_t stream_index() const noexcept { return stream_index_; }

  std::uint64_t next_u64() noexcept {
    if (half_ == 2) refill();
    const std::uint64_t out = (std::uint64_t{block_[2 * half_]} << 32) | block_[2 * half_ + 1];
    ++half_;
    return out;
  }

  /// Uniform on (0, 1); never returns exactly 0 or 1.
  double next_uniform() noexcept { return detail::bits_to_open_unit(next_u64()); }

 private:
  void refill() noexcept {
    const std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(counter_), static_cast<std::uint32_t>(counter_ >> 32),
        static_cast<std::uint32_t>(stream_index_), static_cast<std::uint32_t>(stream_index_ >> 32)};
    const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(master_seed_),
                                              static_cast<std::uint32_t>(master_seed_ >> 32)};
    block_ = detail::philox4x32_10(ctr, key);
    ++counter_;
    half_ = 0;
  }

  std::uint64_t master_seed_;
  std::uint64_t stream_index_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> block_{};
  int half_ = 2;
};

/// Pure: the stream depends only on the two arguments.
inline RngStream derive_substream(std::uint64_t master_seed, std::uint64_t replicate_index) noexcept {
  return RngStream(master_seed, replicate_index);
}

struct SeedInfo {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_index = 0;

  friend bool operator==(const SeedInfo&, const SeedInfo&) = default;
};

/// n observations of one family, plus where they came from.
struct SampleBatch {
  FamilyId family = FamilyId::Normal;
  std::vector<double> values;
  std::optional<double> true_theta;
  std::optional<double> true_psi;
  std::optional<SeedInfo> seed_info;

  [[nodiscard]] std::size_t size() const noexcept { return values.size(); }

  friend bool operator==(const SampleBatch&, const SampleBatch&) = default;
};

namespace detail {

inline void require_count(std::size_t n) {
  if (n == 0) throw Error(ErrorCode::ZeroSize, "sample size must be at least 1");
}

inline void require_positive(double value, ErrorCode code, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw Error(code, std::string(what) + " must be positive and finite, got " + std::to_string(value));
  }
}

inline SampleBatch make_batch(FamilyId family, const RngStream& stream, double theta, double psi,
                              std::size_t n) {
  SampleBatch batch;
  batch.family = family;
  batch.values.reserve(n);
  batch.true_theta = theta;
  batch.true_psi = psi;
  batch.seed_info = SeedInfo{stream.master_seed(), stream.stream_index()};
  return batch;
}

/// Standard normal quantile.
inline double normal_quantile(double u) {
  return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * u);
}

}  // namespace detail

/// Normal(theta, variance psi).  X = theta + sqrt(psi) * Phi^{-1}(U).
inline SampleBatch sample_normal(RngStream& stream, double theta, double psi, std::size_t n) {
  detail::require_positive(psi, ErrorCode::NonPositiveVariance, "variance psi");
  detail::require_count(n);
  SampleBatch batch = detail::make_batch(FamilyId::Normal, stream, theta, psi, n);
  const double sd = std::sqrt(psi);
  for (std::size_t i = 0; i < n; ++i) {
    batch.values.push_back(theta + sd * detail::normal_quantile(stream.next_uniform()));
  }
  return batch;
}

/// Shifted exponential on [theta, inf) with scale psi.  X = theta - psi * log(1 - U).
inline SampleBatch sample_shifted_exponential(RngStream& stream, double theta, double psi,
                                              std::size_t n) {
  detail::require_positive(psi, ErrorCode::NonPositiveScale, "scale psi");
  detail::require_count(n);
  SampleBatch batch = detail::make_batch(FamilyId::ShiftedExponential, stream, theta, psi, n);
  for (std::size_t i = 0; i < n; ++i) {
    batch.values.push_back(theta - psi * std::log1p(-stream.next_uniform()));
  }
  return batch;
}

/// Pareto with scale theta and shape psi.  X = theta * U^{-1/psi}.
///
/// The result is tagged ParetoShape; callers working in the inverse-shape
/// parametrization should use sample_family() or retag the batch.
inline SampleBatch sample_pareto(RngStream& stream, double theta, double psi, std::size_t n) {
  detail::require_positive(theta, ErrorCode::NonPositiveScale, "scale theta");
  detail::require_positive(psi, ErrorCode::NonPositiveShape, "shape psi");
  detail::require_count(n);
  SampleBatch batch = detail::make_batch(FamilyId::ParetoShape, stream, theta, psi, n);
  const double inv_shape = 1.0 / psi;
  for (std::size_t i = 0; i < n; ++i) {
    // max() guards the last ulp: theta * u^{-1/psi} >= theta holds in exact
    // arithmetic but the product can round below theta when u is near 1.
    batch.values.push_back(std::max(theta, theta * std::pow(stream.next_uniform(), -inv_shape)));
  }
  return batch;
}

/// Gamma(shape, rate) by inversion of the regularized incomplete gamma function.
inline std::vector<double> sample_gamma(RngStream& stream, double shape, double rate, std::size_t count) {
  detail::require_positive(shape, ErrorCode::NonPositiveShape, "gamma shape");
  detail::require_positive(rate, ErrorCode::NonPositiveRate, "gamma rate");
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(boost::math::gamma_p_inv(shape, stream.next_uniform()) / rate);
  }
  return out;
}

/// Samples in the parametrization of `family`.  For ParetoInverseShape, psi is
/// psi* and the underlying Pareto shape is 1/psi*.
inline SampleBatch sample_family(FamilyId family, RngStream& stream, double theta, double psi,
                                 std::size_t n) {
  switch (family) {
    case FamilyId::Normal: return sample_normal(stream, theta, psi, n);
    case FamilyId::ShiftedExponential: return sample_shifted_exponential(stream, theta, psi, n);
    case FamilyId::ParetoShape: return sample_pareto(stream, theta, psi, n);
    case FamilyId::ParetoInverseShape: {
      detail::require_positive(psi, ErrorCode::NonPositiveShape, "inverse shape psi*");
      SampleBatch batch = sample_pareto(stream, theta, 1.0 / psi, n);
      batch.family = FamilyId::ParetoInverseShape;
      batch.true_psi = psi;
      return batch;
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown family");
}

}  // namespace mcmle
