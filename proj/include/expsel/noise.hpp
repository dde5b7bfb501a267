#pragma once

#include <string_view>

#include "expsel/rng.hpp"

namespace expsel {

/// Error laws of the simulation design.
enum class ErrorDistribution {
  std_normal,              // Z
  centered_exponential,    // E - 1.3
  normal_pow4_centered,    // Z^4 - 6 * median(Z^4)
  exp_minus_normal_pow4,   // E - Z^4
};

/// Median of Z^4 for standard normal Z, i.e. the squared median of chi-square(1).
inline constexpr double kMedianNormalPow4 = 0.20696714908083025;

/// Shift applied to Exp(1) draws in the centered exponential law.
inline constexpr double kExponentialShift = 1.3;

std::string_view to_string(ErrorDistribution d);
ErrorDistribution error_distribution_from_string(std::string_view s);

double sample_error(ErrorDistribution d, Engine& rng);

}  // namespace expsel
