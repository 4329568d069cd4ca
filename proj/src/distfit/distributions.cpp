#include "mfwind/distfit/distributions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mfwind::distfit {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Below this |xi| the GEV is evaluated through its Gumbel limit.
constexpr double kGumbelShape = 1e-9;

template <class... Ts>
struct Overloaded : Ts... {
	using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Returns ln t(x) for the GEV, where t = (1 + xi z)^(-1/xi), or nullopt-like NaN
// outside the support.
double gev_log_t(const GevParams& p, double x) {
	const double z = (x - p.location) / p.scale;
	if (std::abs(p.shape) < kGumbelShape) {
		return -z;
	}
	const double arg = 1.0 + p.shape * z;
	if (arg <= 0.0) {
		return std::numeric_limits<double>::quiet_NaN();
	}
	return -std::log1p(p.shape * z) / p.shape;
}

}  // namespace

std::string_view family_name(Family family) {
	switch (family) {
		case Family::Weibull: return "Weibull";
		case Family::Gamma: return "Gamma";
		case Family::Gev: return "GEV";
	}
	return "?";
}

Family parse_family(std::string_view name) {
	if (name == "Weibull" || name == "weibull") return Family::Weibull;
	if (name == "Gamma" || name == "gamma") return Family::Gamma;
	if (name == "GEV" || name == "gev") return Family::Gev;
	throw std::invalid_argument("unknown distribution family '" + std::string(name) + "'");
}

Family DistributionFit::family() const {
	return std::visit(Overloaded{[](const WeibullParams&) { return Family::Weibull; },
	                             [](const GammaParams&) { return Family::Gamma; },
	                             [](const GevParams&) { return Family::Gev; }},
	                  params);
}

std::vector<std::pair<std::string, double>> DistributionFit::named_params() const {
	return std::visit(
	    Overloaded{[](const WeibullParams& p) -> std::vector<std::pair<std::string, double>> {
		               return {{"k", p.shape}, {"lambda", p.scale}};
	               },
	               [](const GammaParams& p) -> std::vector<std::pair<std::string, double>> {
		               return {{"alpha", p.shape}, {"beta", p.rate}};
	               },
	               [](const GevParams& p) -> std::vector<std::pair<std::string, double>> {
		               return {{"mu", p.location}, {"sigma", p.scale}, {"xi", p.shape}};
	               }},
	    params);
}

bool DistributionFit::valid() const {
	return std::visit(Overloaded{[](const WeibullParams& p) {
		                             return std::isfinite(p.shape) && std::isfinite(p.scale) && p.shape > 0 &&
		                                    p.scale > 0;
	                             },
	                             [](const GammaParams& p) {
		                             return std::isfinite(p.shape) && std::isfinite(p.rate) && p.shape > 0 &&
		                                    p.rate > 0;
	                             },
	                             [](const GevParams& p) {
		                             return std::isfinite(p.location) && std::isfinite(p.scale) &&
		                                    std::isfinite(p.shape) && p.scale > 0;
	                             }},
	                  params);
}

double log_density(const Params& params, double x) {
	return std::visit(
	    Overloaded{[x](const WeibullParams& p) {
		               if (x < 0.0) {
			               return kNegInf;
		               }
		               if (x == 0.0) {
			               if (p.shape == 1.0) return -std::log(p.scale);
			               return p.shape < 1.0 ? std::numeric_limits<double>::infinity() : kNegInf;
		               }
		               const double r = x / p.scale;
		               return std::log(p.shape / p.scale) + (p.shape - 1.0) * std::log(r) - std::pow(r, p.shape);
	               },
	               [x](const GammaParams& p) {
		               if (x < 0.0) {
			               return kNegInf;
		               }
		               if (x == 0.0) {
			               if (p.shape == 1.0) return std::log(p.rate);
			               return p.shape < 1.0 ? std::numeric_limits<double>::infinity() : kNegInf;
		               }
		               return p.shape * std::log(p.rate) + (p.shape - 1.0) * std::log(x) - p.rate * x -
		                      std::lgamma(p.shape);
	               },
	               [x](const GevParams& p) {
		               const double log_t = gev_log_t(p, x);
		               if (std::isnan(log_t)) {
			               return kNegInf;
		               }
		               // f = t^(xi+1) e^(-t) / sigma
		               return -std::log(p.scale) + (p.shape + 1.0) * log_t - std::exp(log_t);
	               }},
	    params);
}

double density(const Params& params, double x) {
	const double l = log_density(params, x);
	return l == kNegInf ? 0.0 : std::exp(l);
}

double cdf(const Params& params, double x) {
	return std::visit(Overloaded{[x](const WeibullParams& p) {
		                             return x <= 0.0 ? 0.0 : -std::expm1(-std::pow(x / p.scale, p.shape));
	                             },
	                             [x](const GammaParams& p) {
		                             // Regularized lower incomplete gamma by series / continued fraction.
		                             if (x <= 0.0) return 0.0;
		                             const double a = p.shape;
		                             const double z = p.rate * x;
		                             const double log_pre = a * std::log(z) - z - std::lgamma(a);
		                             if (z < a + 1.0) {
			                             double term = 1.0 / a;
			                             double sum = term;
			                             for (int k = 1; k < 10000; ++k) {
				                             term *= z / (a + k);
				                             sum += term;
				                             if (term < sum * 1e-16) break;
			                             }
			                             return std::exp(log_pre) * sum;
		                             }
		                             // Lentz continued fraction for the upper tail.
		                             double b = z + 1.0 - a;
		                             double c = 1e300;
		                             double d = 1.0 / b;
		                             double h = d;
		                             for (int k = 1; k < 10000; ++k) {
			                             const double an = -k * (k - a);
			                             b += 2.0;
			                             d = an * d + b;
			                             if (std::abs(d) < 1e-300) d = 1e-300;
			                             c = b + an / c;
			                             if (std::abs(c) < 1e-300) c = 1e-300;
			                             d = 1.0 / d;
			                             const double delta = d * c;
			                             h *= delta;
			                             if (std::abs(delta - 1.0) < 1e-16) break;
		                             }
		                             return 1.0 - std::exp(log_pre) * h;
	                             },
	                             [x](const GevParams& p) {
		                             const double log_t = gev_log_t(p, x);
		                             if (std::isnan(log_t)) {
			                             // Below the lower endpoint (xi > 0) or above the upper one (xi < 0).
			                             return p.shape > 0.0 ? 0.0 : 1.0;
		                             }
		                             return std::exp(-std::exp(log_t));
	                             }},
	                  params);
}

double log_likelihood(const Params& params, const std::vector<double>& sample) {
	double sum = 0.0;
	for (double x : sample) {
		const double l = log_density(params, x);
		if (!std::isfinite(l)) {
			return kNegInf;
		}
		sum += l;
	}
	return sum;
}

}  // namespace mfwind::distfit
