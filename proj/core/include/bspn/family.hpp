#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace bspn {

// One-dimensional conjugate leaf families. The numeric values double as the
// on-disk family tag and as the alternative index of Hyperparams/LeafParams.
enum class Family : std::uint8_t { Gaussian = 0, Exponential = 1, Poisson = 2, Multinomial = 3 };

struct FamilySpec {
  Family family = Family::Gaussian;
  // Number of categories (Multinomial only); category codes are 1..categories.
  std::uint32_t categories = 0;

  friend bool operator==(const FamilySpec&, const FamilySpec&) = default;
};

std::string_view family_name(Family f) noexcept;
// Throws ConfigError for unknown names.
Family parse_family(std::string_view name);

}  // namespace bspn
