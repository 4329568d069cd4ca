#pragma once

#include "mfwind/core/time_series.hpp"

#include <span>
#include <vector>

namespace mfwind::stl {

/// STL parameters. Windows are odd sample counts.
struct StlConfig {
	int period = 365;
	int seasonal_window = 731;
	int trend_window = 0;    // 0: smallest odd >= 1.5 * period / (1 - 1.5 / seasonal_window)
	int lowpass_window = 0;  // 0: smallest odd >= period
	int inner_iterations = 2;
	int outer_iterations = 1;
	int loess_degree = 1;  // used for seasonal, trend and low-pass smoothers

	/// Copy with the derived windows filled in; throws std::invalid_argument on
	/// an invalid combination.
	StlConfig resolved() const;
};

struct StlDecomposition {
	std::vector<double> trend;
	std::vector<double> seasonal;
	std::vector<double> remainder;
	std::vector<double> weights;  // final robustness weights, all 1 without outer passes
	int period = 0;
};

int next_odd(double value);

/// Additive seasonal-trend decomposition with Loess (inner/outer loop scheme of
/// Cleveland et al., 1990). Throws std::invalid_argument when the series is
/// shorter than two periods.
StlDecomposition stl_decompose(std::span<const double> values, const StlConfig& cfg = {});

inline StlDecomposition stl_decompose(const core::TimeSeries& ts, const StlConfig& cfg = {}) {
	return stl_decompose(std::span<const double>(ts.values), cfg);
}

}  // namespace mfwind::stl
