#pragma once

#include "mfwind/core/time_series.hpp"

#include <cstdint>

namespace mfwind::synth {

struct CascadeSpec {
	int levels = 16;  // series length 2^levels
	double a = 0.75;  // weight of the heavier branch
	std::uint64_t seed = 0;  // unused by the deterministic cascade

	/// Throws std::invalid_argument unless 1 <= levels <= 24 and 0.5 < a < 1.
	void validate() const;
};

/// Deterministic binomial multiplicative cascade: x_k = a^n(k) (1-a)^(levels - n(k))
/// with n(k) the number of 1 bits of k. Values sum to 1.
core::TimeSeries binomial_cascade(const CascadeSpec& spec);

/// Generalized Hurst exponent of the binomial cascade,
/// h(q) = 1/q - ln(a^q + (1-a)^q) / (q ln 2), with its limit
/// -(ln a + ln(1-a)) / (2 ln 2) at q = 0.
double analytic_cascade_hurst(double a, double q);

/// Singularity strength alpha(q) = d tau / dq of the cascade, tau(q) = q h(q) - 1.
double analytic_cascade_alpha(double a, double q);

/// i.i.d. standard normal values from the seeded portable generator.
core::TimeSeries white_noise(std::size_t n, std::uint64_t seed);

/// Fractional Gaussian noise with unit variance and Hurst parameter h_target,
/// generated exactly by circulant embedding of its autocovariance. If the
/// embedding has negative eigenvalues they are clipped to zero (approximate
/// spectral synthesis). n must be a power of two.
core::TimeSeries fractional_noise(double h_target, std::size_t n, std::uint64_t seed);

/// Autocovariance of unit-variance fGn at integer lag k.
double fgn_autocovariance(double h, std::size_t lag);

}  // namespace mfwind::synth
