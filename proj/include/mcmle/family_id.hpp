#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace mcmle {

/// The four parametrizations. ParetoInverseShape carries psi* = 1/shape.
enum class FamilyId { Normal, ShiftedExponential, ParetoShape, ParetoInverseShape };

inline constexpr std::array<FamilyId, 4> kAllFamilies = {
    FamilyId::Normal, FamilyId::ShiftedExponential, FamilyId::ParetoShape,
    FamilyId::ParetoInverseShape};

/// CLI / serialization name.
constexpr std::string_view family_name(FamilyId id) noexcept {
  switch (id) {
    case FamilyId::Normal: return "normal";
    case FamilyId::ShiftedExponential: return "shifted-exp";
    case FamilyId::ParetoShape: return "pareto-shape";
    case FamilyId::ParetoInverseShape: return "pareto-inverse-shape";
  }
  return "unknown";
}

constexpr std::optional<FamilyId> parse_family(std::string_view name) noexcept {
  for (FamilyId id : kAllFamilies) {
    if (family_name(id) == name) return id;
  }
  return std::nullopt;
}

constexpr bool is_pareto(FamilyId id) noexcept {
  return id == FamilyId::ParetoShape || id == FamilyId::ParetoInverseShape;
}

/// Families whose support is [theta, inf).
constexpr bool is_left_bounded(FamilyId id) noexcept { return id != FamilyId::Normal; }

}  // namespace mcmle
