#include "mfwind/stl/stl.hpp"

#include "mfwind/stl/loess.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mfwind::stl {

int next_odd(double value) {
	auto n = static_cast<int>(std::ceil(value));
	if (n % 2 == 0) {
		++n;
	}
	return n;
}

StlConfig StlConfig::resolved() const {
	StlConfig cfg = *this;
	if (cfg.period < 2) {
		throw std::invalid_argument("STL period must be at least 2");
	}
	if (cfg.trend_window == 0) {
		cfg.trend_window = next_odd(1.5 * cfg.period / (1.0 - 1.5 / cfg.seasonal_window));
	}
	if (cfg.lowpass_window == 0) {
		cfg.lowpass_window = next_odd(cfg.period);
	}
	if (cfg.seasonal_window < 7 || cfg.seasonal_window % 2 == 0) {
		throw std::invalid_argument("seasonal window must be odd and >= 7");
	}
	for (int w : {cfg.trend_window, cfg.lowpass_window}) {
		if (w <= 0 || w % 2 == 0) {
			throw std::invalid_argument("STL windows must be odd and positive");
		}
	}
	if (cfg.inner_iterations < 1 || cfg.outer_iterations < 0) {
		throw std::invalid_argument("STL needs inner_iterations >= 1 and outer_iterations >= 0");
	}
	if (cfg.loess_degree < 0 || cfg.loess_degree > 2) {
		throw std::invalid_argument("loess degree must be 0, 1 or 2");
	}
	return cfg;
}

namespace {

// Moving average of length `len`; output has x.size() - len + 1 entries.
std::vector<double> moving_average(std::span<const double> x, std::size_t len) {
	std::vector<double> out(x.size() - len + 1);
	double sum = 0.0;
	for (std::size_t i = 0; i < len; ++i) {
		sum += x[i];
	}
	out[0] = sum / static_cast<double>(len);
	for (std::size_t i = 1; i < out.size(); ++i) {
		sum += x[i + len - 1] - x[i - 1];
		out[i] = sum / static_cast<double>(len);
	}
	return out;
}

// Smooths each cycle-subseries and extrapolates one cycle at both ends, so the
// result has n + 2 * period entries (index 0 is one period before the data).
std::vector<double> smooth_cycle_subseries(std::span<const double> detrended, std::span<const double> weights,
                                           const StlConfig& cfg) {
	const auto n = detrended.size();
	const auto np = static_cast<std::size_t>(cfg.period);
	std::vector<double> out(n + 2 * np, 0.0);
	std::vector<double> sub;
	std::vector<double> sub_w;
	for (std::size_t phase = 0; phase < np; ++phase) {
		sub.clear();
		sub_w.clear();
		for (std::size_t i = phase; i < n; i += np) {
			sub.push_back(detrended[i]);
			sub_w.push_back(weights[i]);
		}
		const auto k = sub.size();
		if (k == 0) {
			continue;
		}
		for (std::size_t j = 0; j < k + 2; ++j) {
			const double at = static_cast<double>(j) - 1.0;
			auto v = loess_estimate(sub, at, cfg.seasonal_window, cfg.loess_degree, sub_w);
			double value = 0.0;
			if (v) {
				value = *v;
			} else if (j >= 1 && j <= k) {
				value = sub[j - 1];
			} else {
				value = sub[j == 0 ? 0 : k - 1];
			}
			out[phase + j * np] = value;
		}
	}
	return out;
}

// Low-pass filter of the cycle-subseries: MA(period), MA(period), MA(3), Loess.
std::vector<double> low_pass(std::span<const double> cycle, const StlConfig& cfg) {
	const auto np = static_cast<std::size_t>(cfg.period);
	auto a = moving_average(cycle, np);
	auto b = moving_average(a, np);
	auto c = moving_average(b, 3);
	return loess_smooth(c, cfg.lowpass_window, cfg.loess_degree);
}

std::vector<double> robustness_weights(std::span<const double> y, std::span<const double> fit) {
	const auto n = y.size();
	std::vector<double> abs_resid(n);
	for (std::size_t i = 0; i < n; ++i) {
		abs_resid[i] = std::abs(y[i] - fit[i]);
	}
	auto sorted = abs_resid;
	const auto mid = n / 2;
	std::nth_element(sorted.begin(), sorted.begin() + mid, sorted.end());
	double median = sorted[mid];
	if (n % 2 == 0) {
		median = 0.5 * (median + *std::max_element(sorted.begin(), sorted.begin() + mid));
	}
	const double h = 6.0 * median;
	std::vector<double> w(n, 1.0);
	if (h <= 0.0) {
		return w;
	}
	for (std::size_t i = 0; i < n; ++i) {
		const double u = abs_resid[i] / h;
		if (u <= 0.001) {
			w[i] = 1.0;
		} else if (u <= 0.999) {
			const double t = 1.0 - u * u;
			w[i] = t * t;
		} else {
			w[i] = 0.0;
		}
	}
	return w;
}

}  // namespace

StlDecomposition stl_decompose(std::span<const double> values, const StlConfig& config) {
	const StlConfig cfg = config.resolved();
	const auto n = values.size();
	const auto np = static_cast<std::size_t>(cfg.period);
	if (n < 2 * np) {
		throw std::invalid_argument("STL needs at least two full periods (" + std::to_string(2 * np) +
		                            " samples), got " + std::to_string(n));
	}

	StlDecomposition out;
	out.period = cfg.period;
	out.trend.assign(n, 0.0);
	out.seasonal.assign(n, 0.0);
	out.weights.assign(n, 1.0);
	std::vector<double> work(n);

	for (int outer = 0; outer <= cfg.outer_iterations; ++outer) {
		for (int inner = 0; inner < cfg.inner_iterations; ++inner) {
			for (std::size_t i = 0; i < n; ++i) {
				work[i] = values[i] - out.trend[i];
			}
			const auto cycle = smooth_cycle_subseries(work, out.weights, cfg);
			const auto lowpass = low_pass(cycle, cfg);
			for (std::size_t i = 0; i < n; ++i) {
				out.seasonal[i] = cycle[np + i] - lowpass[i];
				work[i] = values[i] - out.seasonal[i];
			}
			out.trend = loess_smooth(work, cfg.trend_window, cfg.loess_degree, out.weights);
		}
		if (outer < cfg.outer_iterations) {
			for (std::size_t i = 0; i < n; ++i) {
				work[i] = out.trend[i] + out.seasonal[i];
			}
			out.weights = robustness_weights(values, work);
		}
	}

	out.remainder.resize(n);
	for (std::size_t i = 0; i < n; ++i) {
		out.remainder[i] = values[i] - out.trend[i] - out.seasonal[i];
	}
	return out;
}

}  // namespace mfwind::stl
