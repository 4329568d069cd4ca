#pragma once

#include "mfwind/core/time_series.hpp"
#include "mfwind/distfit/density_estimate.hpp"
#include "mfwind/distfit/distributions.hpp"

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mfwind::distfit {

inline constexpr std::size_t kMinFitSample = 30;
inline constexpr int kMaxFitIterations = 500;

/// Maximum-likelihood search that did not converge; carries the last iterate.
class FitError : public std::runtime_error {
public:
	FitError(const std::string& message, DistributionFit last)
	    : std::runtime_error(message), last_(std::move(last)) {}

	const DistributionFit& last_iterate() const { return last_; }

private:
	DistributionFit last_;
};

/// Moment-type starting values: log-moments (Weibull), mean^2/var (Gamma),
/// probability-weighted moments (GEV).
DistributionFit initial_estimate(std::span<const double> sample, Family family);

/// Maximum-likelihood fit by Nelder-Mead from initial_estimate(). Requires at
/// least 30 samples, and strictly positive samples for Weibull and Gamma.
/// Throws FitError after 500 iterations without convergence.
DistributionFit fit_mle(std::span<const double> sample, Family family);

/// Trapezoid quadrature of p ln(p/q) over the density grid, skipping points
/// with p <= 1e-12 and flooring q at 1e-300.
double kl_divergence(const EmpiricalDensity& p, const DistributionFit& fit);
double kl_divergence(const EmpiricalDensity& p, const Params& q);

struct RankedFamily {
	Family family = Family::Gev;
	double kl = 0.0;
	std::optional<DistributionFit> fit;  // last iterate when the fit failed
	std::string error;                   // empty on success

	bool ok() const { return error.empty(); }
};

/// Fits all three families and orders them by ascending KL divergence from the
/// kernel density of the sample. Families whose fit failed come last.
std::vector<RankedFamily> rank_distributions(std::span<const double> sample);

inline std::vector<RankedFamily> rank_distributions(const core::TimeSeries& ts) {
	return rank_distributions(std::span<const double>(ts.values));
}

}  // namespace mfwind::distfit
