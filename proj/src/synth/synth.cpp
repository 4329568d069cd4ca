#include "mfwind/synth/synth.hpp"

#include "mfwind/core/random.hpp"

#include <unsupported/Eigen/FFT>

#include <bit>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace mfwind::synth {

void CascadeSpec::validate() const {
	if (levels < 1 || levels > 24) {
		throw std::invalid_argument("cascade levels must lie in [1, 24]");
	}
	if (!(a > 0.5 && a < 1.0)) {
		throw std::invalid_argument("cascade weight a must lie in (0.5, 1)");
	}
}

core::TimeSeries binomial_cascade(const CascadeSpec& spec) {
	spec.validate();
	const auto levels = static_cast<unsigned>(spec.levels);
	std::vector<double> by_count(levels + 1);
	for (unsigned n = 0; n <= levels; ++n) {
		by_count[n] = std::pow(spec.a, n) * std::pow(1.0 - spec.a, levels - n);
	}
	core::TimeSeries ts;
	ts.station_id = "cascade";
	ts.start_date = core::make_date(2012, 1, 1);
	const std::size_t n = std::size_t{1} << levels;
	ts.values.resize(n);
	for (std::size_t k = 0; k < n; ++k) {
		ts.values[k] = by_count[static_cast<unsigned>(std::popcount(k))];
	}
	return ts;
}

double analytic_cascade_hurst(double a, double q) {
	const double b = 1.0 - a;
	if (q == 0.0) {
		return -(std::log(a) + std::log(b)) / (2.0 * std::numbers::ln2);
	}
	return 1.0 / q - std::log(std::pow(a, q) + std::pow(b, q)) / (q * std::numbers::ln2);
}

double analytic_cascade_alpha(double a, double q) {
	const double b = 1.0 - a;
	const double aq = std::pow(a, q);
	const double bq = std::pow(b, q);
	return -(aq * std::log(a) + bq * std::log(b)) / ((aq + bq) * std::numbers::ln2);
}

core::TimeSeries white_noise(std::size_t n, std::uint64_t seed) {
	core::Rng rng(seed);
	core::TimeSeries ts;
	ts.station_id = "white_noise";
	ts.start_date = core::make_date(2012, 1, 1);
	ts.values.resize(n);
	for (auto& v : ts.values) {
		v = rng.normal();
	}
	return ts;
}

double fgn_autocovariance(double h, std::size_t lag) {
	const double k = static_cast<double>(lag);
	const double e = 2.0 * h;
	return 0.5 * (std::pow(k + 1.0, e) - 2.0 * std::pow(k, e) + std::pow(std::abs(k - 1.0), e));
}

core::TimeSeries fractional_noise(double h_target, std::size_t n, std::uint64_t seed) {
	if (!(h_target > 0.0 && h_target < 1.0)) {
		throw std::invalid_argument("fGn Hurst parameter must lie in (0, 1)");
	}
	if (n < 2 || !std::has_single_bit(n)) {
		throw std::invalid_argument("fGn length must be a power of two, got " + std::to_string(n));
	}
	const std::size_t m = 2 * n;
	std::vector<std::complex<double>> row(m);
	for (std::size_t k = 0; k <= n; ++k) {
		row[k] = fgn_autocovariance(h_target, k);
	}
	for (std::size_t k = n + 1; k < m; ++k) {
		row[k] = row[m - k];
	}
	Eigen::FFT<double> fft;
	std::vector<std::complex<double>> eigenvalues;
	fft.fwd(eigenvalues, row);

	core::Rng rng(seed);
	std::vector<std::complex<double>> weighted(m);
	for (std::size_t k = 0; k < m; ++k) {
		const double lambda = std::max(eigenvalues[k].real(), 0.0);
		const double re = rng.normal();
		const double im = rng.normal();
		weighted[k] = std::sqrt(lambda / static_cast<double>(m)) * std::complex<double>(re, im);
	}
	std::vector<std::complex<double>> mixed;
	fft.fwd(mixed, weighted);

	core::TimeSeries ts;
	ts.station_id = "fgn";
	ts.start_date = core::make_date(2012, 1, 1);
	ts.values.resize(n);
	for (std::size_t i = 0; i < n; ++i) {
		ts.values[i] = mixed[i].real();
	}
	return ts;
}

}  // namespace mfwind::synth
