#include "mfwind/distfit/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace mfwind::distfit {

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                             const std::vector<double>& start, const std::vector<double>& step,
                             const NelderMeadOptions& options) {
	const std::size_t n = start.size();
	if (n == 0 || step.size() != n) {
		throw std::invalid_argument("nelder_mead: start/step size mismatch");
	}
	auto eval = [&](const std::vector<double>& x) {
		const double v = objective(x);
		return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
	};

	std::vector<std::vector<double>> simplex(n + 1, start);
	for (std::size_t i = 0; i < n; ++i) {
		simplex[i + 1][i] += step[i];
	}
	std::vector<double> values(n + 1);
	for (std::size_t i = 0; i <= n; ++i) {
		values[i] = eval(simplex[i]);
	}

	std::vector<std::size_t> order(n + 1);
	std::vector<double> centroid(n);
	std::vector<double> trial(n);
	auto point = [&](double t, const std::vector<double>& worst) {
		std::vector<double> p(n);
		for (std::size_t j = 0; j < n; ++j) {
			p[j] = centroid[j] + t * (worst[j] - centroid[j]);
		}
		return p;
	};

	NelderMeadResult result;
	for (int iter = 0;; ++iter) {
		std::iota(order.begin(), order.end(), 0);
		// Stable sort keeps ties deterministic (earlier vertex wins).
		std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
		const auto best = order.front();
		const auto worst = order.back();
		const auto second_worst = order[n - 1];

		double diameter = 0.0;
		for (std::size_t i = 0; i <= n; ++i) {
			for (std::size_t j = 0; j < n; ++j) {
				diameter = std::max(diameter, std::abs(simplex[i][j] - simplex[best][j]) /
				                                  (1.0 + std::abs(simplex[best][j])));
			}
		}
		const double spread = values[worst] - values[best];
		const bool converged = std::isfinite(values[worst]) &&
		                       spread <= options.f_tolerance * (std::abs(values[best]) + 1e-300) &&
		                       diameter <= options.x_tolerance;
		if (converged || (std::isfinite(values[worst]) && spread == 0.0 && diameter <= options.x_tolerance) ||
		    iter >= options.max_iterations) {
			result.x = simplex[best];
			result.value = values[best];
			result.iterations = iter;
			result.converged = converged || iter < options.max_iterations;
			return result;
		}

		std::fill(centroid.begin(), centroid.end(), 0.0);
		for (std::size_t i = 0; i <= n; ++i) {
			if (i == worst) continue;
			for (std::size_t j = 0; j < n; ++j) {
				centroid[j] += simplex[i][j] / static_cast<double>(n);
			}
		}

		const auto reflected = point(-1.0, simplex[worst]);
		const double f_reflected = eval(reflected);
		if (f_reflected < values[best]) {
			const auto expanded = point(-2.0, simplex[worst]);
			const double f_expanded = eval(expanded);
			if (f_expanded < f_reflected) {
				simplex[worst] = expanded;
				values[worst] = f_expanded;
			} else {
				simplex[worst] = reflected;
				values[worst] = f_reflected;
			}
			continue;
		}
		if (f_reflected < values[second_worst]) {
			simplex[worst] = reflected;
			values[worst] = f_reflected;
			continue;
		}
		const bool outside = f_reflected < values[worst];
		const auto contracted = point(outside ? -0.5 : 0.5, simplex[worst]);
		const double f_contracted = eval(contracted);
		if (f_contracted < (outside ? f_reflected : values[worst])) {
			simplex[worst] = contracted;
			values[worst] = f_contracted;
			continue;
		}
		for (std::size_t i = 0; i <= n; ++i) {
			if (i == best) continue;
			for (std::size_t j = 0; j < n; ++j) {
				simplex[i][j] = simplex[best][j] + 0.5 * (simplex[i][j] - simplex[best][j]);
			}
			values[i] = eval(simplex[i]);
		}
	}
}

}  // namespace mfwind::distfit
