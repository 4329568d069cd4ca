#pragma once

#include <optional>
#include <span>
#include <vector>

namespace mfwind::stl {

/// Local polynomial (Loess) smoother on an equally spaced abscissa 0..n-1.
///
/// Each fitted value uses the `window` nearest samples (the window is shifted,
/// not padded, at the series ends; if window > n every sample is used and the
/// bandwidth is widened by (window - n) / 2). Weights are tricube in distance
/// times the optional robustness weights.
///
/// Throws std::invalid_argument when window < degree + 2, when degree is not
/// 0, 1 or 2, or when robustness weights have the wrong length or leave [0, 1].
std::vector<double> loess_smooth(std::span<const double> x, int window, int degree,
                                 std::span<const double> robustness_weights = {});

/// Single Loess estimate at abscissa `at` (may lie outside [0, n-1], which the
/// cycle-subseries step needs for its one-step extrapolation). Returns nullopt
/// when all weights in the neighbourhood vanish.
std::optional<double> loess_estimate(std::span<const double> y, double at, int window, int degree,
                                     std::span<const double> robustness_weights = {});

}  // namespace mfwind::stl
