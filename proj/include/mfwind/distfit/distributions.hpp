#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace mfwind::distfit {

enum class Family { Weibull, Gamma, Gev };

std::string_view family_name(Family family);
Family parse_family(std::string_view name);

struct WeibullParams {
	double shape = 1.0;  // k
	double scale = 1.0;  // lambda
};

struct GammaParams {
	double shape = 1.0;  // alpha
	double rate = 1.0;   // beta
};

struct GevParams {
	double location = 0.0;  // mu
	double scale = 1.0;     // sigma
	double shape = 0.0;     // xi; 0 is the Gumbel limit
};

using Params = std::variant<WeibullParams, GammaParams, GevParams>;

struct DistributionFit {
	Params params;
	double log_likelihood = 0.0;
	std::size_t sample_size = 0;

	Family family() const;

	/// (name, value) pairs in a fixed order, e.g. {"k", "lambda"} for Weibull.
	std::vector<std::pair<std::string, double>> named_params() const;

	/// True when scales/shapes that must be positive are, and all values are finite.
	bool valid() const;
};

double density(const Params& params, double x);
double log_density(const Params& params, double x);
double cdf(const Params& params, double x);

inline double density(const DistributionFit& fit, double x) { return density(fit.params, x); }

/// Sum of log densities; -inf when any point has zero density.
double log_likelihood(const Params& params, const std::vector<double>& sample);

}  // namespace mfwind::distfit
