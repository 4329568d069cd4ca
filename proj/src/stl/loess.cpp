#include "mfwind/stl/loess.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace mfwind::stl {

namespace {

void check_arguments(std::size_t n, int window, int degree, std::span<const double> weights) {
	if (degree < 0 || degree > 2) {
		throw std::invalid_argument("loess degree must be 0, 1 or 2");
	}
	if (window < degree + 2) {
		throw std::invalid_argument("loess window " + std::to_string(window) +
		                            " too small for degree " + std::to_string(degree));
	}
	if (!weights.empty()) {
		if (weights.size() != n) {
			throw std::invalid_argument("robustness weights length mismatch");
		}
		for (double w : weights) {
			if (!(w >= 0.0 && w <= 1.0)) {
				throw std::invalid_argument("robustness weights must lie in [0, 1]");
			}
		}
	}
}

// Weighted least squares of degree `degree` in u = (j - at) / h, returning the
// intercept, i.e. the fitted value at `at`. Solved from the (degree+1)^2 normal
// equations by Gaussian elimination with partial pivoting.
std::optional<double> local_fit(std::span<const double> y, std::size_t left, std::size_t right, double at,
                                double h, int degree, std::span<const double> robustness) {
	const int p = degree + 1;
	std::array<double, 9> a{};
	std::array<double, 3> b{};
	double weight_sum = 0.0;
	const double lower = 0.001 * h;
	const double upper = 0.999 * h;
	for (std::size_t j = left; j <= right; ++j) {
		const double dist = std::abs(static_cast<double>(j) - at);
		if (dist > upper) {
			continue;
		}
		double w = 1.0;
		if (dist > lower) {
			const double r = dist / h;
			const double c = 1.0 - r * r * r;
			w = c * c * c;
		}
		if (!robustness.empty()) {
			w *= robustness[j];
		}
		if (w <= 0.0) {
			continue;
		}
		weight_sum += w;
		const double u = (static_cast<double>(j) - at) / h;
		const std::array<double, 5> powers{1.0, u, u * u, u * u * u, u * u * u * u};
		for (int r = 0; r < p; ++r) {
			b[r] += w * powers[r] * y[j];
			for (int c = 0; c < p; ++c) {
				a[r * p + c] += w * powers[r + c];
			}
		}
	}
	if (weight_sum <= 0.0) {
		return std::nullopt;
	}
	for (int col = 0; col < p; ++col) {
		int pivot = col;
		for (int r = col + 1; r < p; ++r) {
			if (std::abs(a[r * p + col]) > std::abs(a[pivot * p + col])) {
				pivot = r;
			}
		}
		if (std::abs(a[pivot * p + col]) <= 1e-12 * a[0]) {
			// Too few distinct support points for this degree; fall back to
			// the next lower degree rather than returning garbage.
			if (degree == 0) {
				return std::nullopt;
			}
			return local_fit(y, left, right, at, h, degree - 1, robustness);
		}
		if (pivot != col) {
			for (int c = 0; c < p; ++c) {
				std::swap(a[col * p + c], a[pivot * p + c]);
			}
			std::swap(b[col], b[pivot]);
		}
		for (int r = col + 1; r < p; ++r) {
			const double f = a[r * p + col] / a[col * p + col];
			for (int c = col; c < p; ++c) {
				a[r * p + c] -= f * a[col * p + c];
			}
			b[r] -= f * b[col];
		}
	}
	std::array<double, 3> coef{};
	for (int r = p - 1; r >= 0; --r) {
		double s = b[r];
		for (int c = r + 1; c < p; ++c) {
			s -= a[r * p + c] * coef[c];
		}
		coef[r] = s / a[r * p + r];
	}
	return coef[0];
}

std::optional<double> estimate(std::span<const double> y, double at, int window, int degree,
                               std::span<const double> robustness_weights) {
	const std::size_t n = y.size();
	if (n == 0) {
		return std::nullopt;
	}
	std::size_t left = 0;
	std::size_t right = n - 1;
	double h = 0.0;
	const auto q = static_cast<std::size_t>(window);
	if (q >= n) {
		h = std::max(at - 0.0, static_cast<double>(n - 1) - at) + static_cast<double>(q - n) / 2.0;
	} else {
		// Window of q consecutive samples nearest to `at`, shifted inside the series.
		const double centre = std::clamp(at, 0.0, static_cast<double>(n - 1));
		auto start = static_cast<long>(std::floor(centre)) - static_cast<long>((q - 1) / 2);
		start = std::clamp<long>(start, 0, static_cast<long>(n - q));
		left = static_cast<std::size_t>(start);
		right = left + q - 1;
		// Slide right while the window's far end is closer than its near end.
		while (right + 1 < n && (static_cast<double>(right + 1) - at) < (at - static_cast<double>(left))) {
			++left;
			++right;
		}
		h = std::max(at - static_cast<double>(left), static_cast<double>(right) - at);
	}
	if (h <= 0.0) {
		h = 1.0;
	}
	return local_fit(y, left, right, at, h, degree, robustness_weights);
}

}  // namespace

std::optional<double> loess_estimate(std::span<const double> y, double at, int window, int degree,
                                     std::span<const double> robustness_weights) {
	check_arguments(y.size(), window, degree, robustness_weights);
	return estimate(y, at, window, degree, robustness_weights);
}

std::vector<double> loess_smooth(std::span<const double> x, int window, int degree,
                                 std::span<const double> robustness_weights) {
	check_arguments(x.size(), window, degree, robustness_weights);
	std::vector<double> out(x.size());
	for (std::size_t i = 0; i < x.size(); ++i) {
		const auto v = estimate(x, static_cast<double>(i), window, degree, robustness_weights);
		out[i] = v.value_or(x[i]);
	}
	return out;
}

}  // namespace mfwind::stl
