#include "mfwind/distfit/fit.hpp"

#include "mfwind/distfit/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace mfwind::distfit {

namespace {

constexpr double kEulerGamma = 0.57721566490153286;

struct Moments {
	double mean = 0.0;
	double variance = 0.0;
};

Moments moments(std::span<const double> x) {
	Moments m;
	const auto n = static_cast<double>(x.size());
	m.mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
	double ss = 0.0;
	for (double v : x) {
		ss += (v - m.mean) * (v - m.mean);
	}
	m.variance = ss / (n - 1.0);
	return m;
}

void require_positive(std::span<const double> sample, Family family) {
	for (double x : sample) {
		if (!(x > 0.0)) {
			throw std::invalid_argument(std::string(family_name(family)) + " fit requires strictly positive samples");
		}
	}
}

double log_likelihood_span(const Params& params, std::span<const double> sample) {
	double sum = 0.0;
	for (double x : sample) {
		const double l = log_density(params, x);
		if (!std::isfinite(l)) {
			return -std::numeric_limits<double>::infinity();
		}
		sum += l;
	}
	return sum;
}

// Unconstrained coordinates for the simplex search.
std::vector<double> to_search_space(const Params& params) {
	if (const auto* w = std::get_if<WeibullParams>(&params)) {
		return {std::log(w->shape), std::log(w->scale)};
	}
	if (const auto* g = std::get_if<GammaParams>(&params)) {
		return {std::log(g->shape), std::log(g->rate)};
	}
	const auto& v = std::get<GevParams>(params);
	return {v.location, std::log(v.scale), v.shape};
}

Params from_search_space(Family family, const std::vector<double>& theta) {
	switch (family) {
		case Family::Weibull: return WeibullParams{std::exp(theta[0]), std::exp(theta[1])};
		case Family::Gamma: return GammaParams{std::exp(theta[0]), std::exp(theta[1])};
		case Family::Gev: break;
	}
	return GevParams{theta[0], std::exp(theta[1]), theta[2]};
}

GevParams gev_pwm(std::span<const double> sample) {
	std::vector<double> x(sample.begin(), sample.end());
	std::sort(x.begin(), x.end());
	const auto n = static_cast<double>(x.size());
	double b0 = 0.0;
	double b1 = 0.0;
	double b2 = 0.0;
	for (std::size_t i = 0; i < x.size(); ++i) {
		const double r = static_cast<double>(i);
		b0 += x[i];
		b1 += r / (n - 1.0) * x[i];
		b2 += r * (r - 1.0) / ((n - 1.0) * (n - 2.0)) * x[i];
	}
	b0 /= n;
	b1 /= n;
	b2 /= n;
	const double l2 = 2.0 * b1 - b0;
	GevParams p;
	const double denom = 3.0 * b2 - b0;
	const double c = denom != 0.0 ? l2 / denom - std::log(2.0) / std::log(3.0) : 0.0;
	// Hosking's k is -xi.
	double k = 7.8590 * c + 2.9554 * c * c;
	k = std::clamp(k, -0.9, 0.9);
	if (std::abs(k) < 1e-6 || !std::isfinite(k)) {
		p.shape = 0.0;
		p.scale = l2 / std::numbers::ln2;
		p.location = b0 - kEulerGamma * p.scale;
	} else {
		const double g = std::tgamma(1.0 + k);
		p.shape = -k;
		p.scale = l2 * k / (g * (1.0 - std::pow(2.0, -k)));
		p.location = b0 + p.scale * (g - 1.0) / k;
	}
	if (!(p.scale > 0.0) || !std::isfinite(p.scale)) {
		const auto m = moments(sample);
		p.scale = std::max(std::sqrt(m.variance) * std::sqrt(6.0) / std::numbers::pi, 1e-12);
		p.location = m.mean - kEulerGamma * p.scale;
		p.shape = 0.0;
	}
	return p;
}

}  // namespace

DistributionFit initial_estimate(std::span<const double> sample, Family family) {
	if (sample.size() < 3) {
		throw std::invalid_argument("initial estimate needs at least three samples");
	}
	DistributionFit fit;
	fit.sample_size = sample.size();
	switch (family) {
		case Family::Weibull: {
			require_positive(sample, family);
			std::vector<double> logs(sample.size());
			std::transform(sample.begin(), sample.end(), logs.begin(), [](double x) { return std::log(x); });
			const auto m = moments(logs);
			const double sd = std::sqrt(m.variance);
			const double k = sd > 0.0 ? std::numbers::pi / (sd * std::sqrt(6.0)) : 1e3;
			fit.params = WeibullParams{k, std::exp(m.mean + kEulerGamma / k)};
			break;
		}
		case Family::Gamma: {
			require_positive(sample, family);
			const auto m = moments(sample);
			const double var = std::max(m.variance, 1e-300);
			fit.params = GammaParams{m.mean * m.mean / var, m.mean / var};
			break;
		}
		case Family::Gev: {
			auto p = gev_pwm(sample);
			// Shrink the shape towards the Gumbel limit until every point is in the support.
			for (int i = 0; i < 60 && !std::isfinite(log_likelihood_span(p, sample)); ++i) {
				p.shape *= 0.5;
			}
			if (!std::isfinite(log_likelihood_span(p, sample))) {
				p.shape = 0.0;
			}
			fit.params = p;
			break;
		}
	}
	fit.log_likelihood = log_likelihood_span(fit.params, sample);
	return fit;
}

DistributionFit fit_mle(std::span<const double> sample, Family family) {
	if (sample.size() < kMinFitSample) {
		throw std::invalid_argument("maximum-likelihood fit needs at least " + std::to_string(kMinFitSample) +
		                            " samples");
	}
	for (double x : sample) {
		if (!std::isfinite(x)) {
			throw std::invalid_argument("sample contains non-finite values");
		}
	}
	const DistributionFit start = initial_estimate(sample, family);
	const auto theta0 = to_search_space(start.params);
	std::vector<double> step(theta0.size(), 0.1);
	if (family == Family::Gev) {
		step[0] = 0.1 * std::get<GevParams>(start.params).scale;
		step[2] = 0.05;
	}
	auto objective = [&](const std::vector<double>& theta) {
		return -log_likelihood_span(from_search_space(family, theta), sample);
	};
	NelderMeadOptions options;
	options.max_iterations = kMaxFitIterations;
	const auto result = nelder_mead(objective, theta0, step, options);

	DistributionFit fit;
	fit.params = from_search_space(family, result.x);
	fit.sample_size = sample.size();
	fit.log_likelihood = -result.value;
	if (!result.converged) {
		throw FitError(std::string(family_name(family)) + " likelihood search did not converge in " +
		                   std::to_string(kMaxFitIterations) + " iterations",
		               fit);
	}
	if (!fit.valid()) {
		throw FitError(std::string(family_name(family)) + " fit produced invalid parameters", fit);
	}
	return fit;
}

namespace {

const double kLogFloor = std::log(1e-300);
const double kLogCeiling = std::log(1e300);

}  // namespace

double kl_divergence(const EmpiricalDensity& p, const Params& q) {
	const auto n = p.grid.size();
	std::vector<double> integrand(n, 0.0);
	for (std::size_t i = 0; i < n; ++i) {
		const double pi = p.density[i];
		if (pi <= 1e-12) {
			continue;
		}
		// log form so that an overflowing density (absurd fits on degenerate
		// samples) stays finite; the floor matches q >= 1e-300
		double log_q = log_density(q, p.grid[i]);
		if (std::isnan(log_q)) {
			log_q = kLogFloor;
		}
		log_q = std::clamp(log_q, kLogFloor, kLogCeiling);
		integrand[i] = pi * (std::log(pi) - log_q);
	}
	return trapezoid(p.grid, integrand);
}

double kl_divergence(const EmpiricalDensity& p, const DistributionFit& fit) {
	return kl_divergence(p, fit.params);
}

std::vector<RankedFamily> rank_distributions(std::span<const double> sample) {
	const auto empirical = kernel_density(sample);
	std::vector<RankedFamily> ranked;
	for (Family family : {Family::Weibull, Family::Gamma, Family::Gev}) {
		RankedFamily entry;
		entry.family = family;
		try {
			entry.fit = fit_mle(sample, family);
			entry.kl = kl_divergence(empirical, *entry.fit);
		} catch (const FitError& e) {
			entry.error = e.what();
			entry.fit = e.last_iterate();
			entry.kl = kl_divergence(empirical, *entry.fit);
		} catch (const std::exception& e) {
			entry.error = e.what();
			entry.kl = std::numeric_limits<double>::infinity();
		}
		ranked.push_back(std::move(entry));
	}
	std::stable_sort(ranked.begin(), ranked.end(), [](const RankedFamily& a, const RankedFamily& b) {
		if (a.ok() != b.ok()) {
			return a.ok();
		}
		return a.kl < b.kl;
	});
	return ranked;
}

}  // namespace mfwind::distfit
