#include "mfwind/distfit/density_estimate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace mfwind::distfit {

namespace {

double quantile_sorted(const std::vector<double>& sorted, double p) {
	const double pos = p * static_cast<double>(sorted.size() - 1);
	const auto lo = static_cast<std::size_t>(std::floor(pos));
	const auto hi = std::min(lo + 1, sorted.size() - 1);
	const double t = pos - static_cast<double>(lo);
	return (1.0 - t) * sorted[lo] + t * sorted[hi];
}

}  // namespace

double silverman_bandwidth(std::span<const double> sample) {
	const auto n = sample.size();
	if (n < 2) {
		throw std::invalid_argument("bandwidth needs at least two samples");
	}
	const double mean = std::accumulate(sample.begin(), sample.end(), 0.0) / static_cast<double>(n);
	double ss = 0.0;
	for (double x : sample) {
		ss += (x - mean) * (x - mean);
	}
	const double sd = std::sqrt(ss / static_cast<double>(n - 1));
	std::vector<double> sorted(sample.begin(), sample.end());
	std::sort(sorted.begin(), sorted.end());
	const double iqr = (quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25)) / 1.34;
	double spread = std::min(sd, iqr);
	if (!(spread > 0.0)) {
		spread = std::max(sd, iqr);
	}
	const double bw = 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
	const double floor = 1e-9 * (std::abs(mean) + 1.0);
	return std::max(bw, floor);
}

EmpiricalDensity kernel_density(std::span<const double> sample, std::size_t grid_points,
                                bool nonnegative_support) {
	if (grid_points < 2) {
		throw std::invalid_argument("density grid needs at least two points");
	}
	EmpiricalDensity out;
	out.bandwidth = silverman_bandwidth(sample);
	std::vector<double> sorted(sample.begin(), sample.end());
	std::sort(sorted.begin(), sorted.end());
	double lo = sorted.front() - 3.0 * out.bandwidth;
	const double hi = sorted.back() + 3.0 * out.bandwidth;
	bool clipped = false;
	if (nonnegative_support && lo < 0.0) {
		// first node half a step above 0: Weibull and Gamma densities vanish at 0
		// for shape > 1 and the floored log ratio there would dominate the sum
		lo = hi / static_cast<double>(2 * grid_points - 1);
		clipped = true;
	}
	if (!(hi > lo)) {
		throw std::invalid_argument("sample lies entirely below zero; no nonnegative support");
	}
	out.grid.resize(grid_points);
	out.density.assign(grid_points, 0.0);
	const double dx = (hi - lo) / static_cast<double>(grid_points - 1);
	for (std::size_t i = 0; i < grid_points; ++i) {
		out.grid[i] = lo + dx * static_cast<double>(i);
	}

	// Kernel contributions beyond 9 bandwidths are below 1e-17 and skipped.
	const double cutoff = 9.0 * out.bandwidth;
	const double norm = 1.0 / (static_cast<double>(sorted.size()) * out.bandwidth * std::sqrt(2.0 * std::numbers::pi));
	for (std::size_t i = 0; i < grid_points; ++i) {
		const double g = out.grid[i];
		auto first = std::lower_bound(sorted.begin(), sorted.end(), g - cutoff);
		auto last = std::upper_bound(first, sorted.end(), g + cutoff);
		double sum = 0.0;
		for (auto it = first; it != last; ++it) {
			const double u = (g - *it) / out.bandwidth;
			sum += std::exp(-0.5 * u * u);
		}
		out.density[i] = sum * norm;
	}
	if (clipped) {
		const double mass = trapezoid(out.grid, out.density);
		if (mass > 0.0) {
			for (double& d : out.density) {
				d /= mass;
			}
		}
	}
	return out;
}

double trapezoid(std::span<const double> grid, std::span<const double> values) {
	double sum = 0.0;
	for (std::size_t i = 1; i < grid.size(); ++i) {
		sum += 0.5 * (values[i] + values[i - 1]) * (grid[i] - grid[i - 1]);
	}
	return sum;
}

}  // namespace mfwind::distfit
