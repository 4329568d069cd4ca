#pragma once

#include <span>
#include <vector>

namespace mfwind::distfit {

/// Sample-side density on an evaluation grid.
struct EmpiricalDensity {
	std::vector<double> grid;
	std::vector<double> density;
	double bandwidth = 0.0;
};

/// 0.9 * min(sd, IQR / 1.34) * n^(-1/5); falls back to whichever spread is
/// positive and finally to a tiny multiple of the sample magnitude so that a
/// constant sample still yields a usable (very peaked) density.
double silverman_bandwidth(std::span<const double> sample);

/// Gaussian kernel density estimate on `grid_points` points spanning
/// [min - 3 bw, max + 3 bw]. With `nonnegative_support` a negative lower end is
/// clipped to half a grid step above 0. After clipping the density is
/// renormalised so its trapezoid integral over the grid is 1.
EmpiricalDensity kernel_density(std::span<const double> sample, std::size_t grid_points = 512,
                                bool nonnegative_support = true);

double trapezoid(std::span<const double> grid, std::span<const double> values);

}  // namespace mfwind::distfit
