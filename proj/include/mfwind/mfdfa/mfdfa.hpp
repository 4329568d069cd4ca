#pragma once

#include "mfwind/core/time_series.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace mfwind::mfdfa {

/// -5, -4.75, ..., 4.75, 5 without 0.
std::vector<double> default_q_grid();

/// `count` logarithmically spaced integers in [min, max], rounded and deduplicated.
std::vector<std::size_t> log_spaced_scales(std::size_t min, std::size_t max, std::size_t count);

/// Powers of two in [min, max].
std::vector<std::size_t> dyadic_scales(std::size_t min, std::size_t max);

struct MfdfaConfig {
	std::vector<double> q_grid = default_q_grid();
	std::size_t scale_min = 10;
	std::size_t scale_max = 180;
	std::size_t n_scales = 21;
	int detrend_degree = 2;
	/// When non-empty, used verbatim instead of the log-spaced min/max/count grid.
	std::vector<std::size_t> explicit_scales;

	std::vector<std::size_t> scales() const;

	/// Checks the grid invariants (q strictly increasing and non-zero, at least
	/// four scales, scale_min >= degree + 2). Throws std::invalid_argument.
	void validate() const;
};

/// Cumulative sum of the mean-subtracted series.
std::vector<double> profile(std::span<const double> x);

/// Variances of the profile around a degree-m polynomial fit in the 2 N_s
/// windows of length s: the N_s forward windows first, then the N_s windows
/// taken from the end of the series (last window first). Divisor is s.
std::vector<double> segment_variances(std::span<const double> profile, std::size_t s, int degree);

struct FluctuationSurface {
	std::vector<std::size_t> scales;
	std::vector<double> q_grid;
	std::vector<double> values;  // row-major: q_grid.size() rows, scales.size() columns
	std::vector<std::size_t> n_segments_per_scale;
	std::size_t floored_variances = 0;  // variances raised to the 1e-300 floor

	double at(std::size_t q_index, std::size_t scale_index) const {
		return values[q_index * scales.size() + scale_index];
	}
};

/// q-th order fluctuation function from per-scale window variances; q = 0 uses
/// the logarithmic average. Throws std::invalid_argument when every variance at
/// some scale is zero.
FluctuationSurface fluctuation_function(const std::vector<std::vector<double>>& variances,
                                        const std::vector<std::size_t>& scales, const std::vector<double>& q_grid);

struct GeneralizedHurst {
	std::vector<double> q_grid;
	std::vector<double> h;
	std::vector<double> std_error;
	std::vector<double> r2;

	/// h and its standard error at q (exact match within 1e-12), throws if absent.
	std::pair<double, double> at(double q) const;
};

/// Least-squares slope of ln F_q(s) against ln s for every q.
GeneralizedHurst generalized_hurst(const FluctuationSurface& surface);

struct MultifractalSpectrum {
	std::vector<double> q_grid;
	std::vector<double> tau;
	/// q values of the spectrum points: the interior of q_grid.
	std::vector<double> spectrum_q;
	std::vector<double> alpha;
	std::vector<double> f_alpha;
};

/// tau = q h - 1, alpha = dtau/dq by three-point central differences at the
/// interior q points, f = q alpha - tau.
MultifractalSpectrum legendre_spectrum(const GeneralizedHurst& gh);

struct MultifractalSummary {
	double H = 0.0;
	double H_stderr = 0.0;
	double W = 0.0;
	double A = 0.0;
	double alpha0 = 0.0;
	double alpha1 = 0.0;
	double alpha2 = 0.0;
	/// f(alpha) = c0 + c1 alpha + c2 alpha^2 + c3 alpha^3 + c4 alpha^4.
	std::array<double, 5> fit_coeffs{};
};

/// How far past each end of the observed alpha range the zero crossings of the
/// fitted quartic are searched, in units of the observed span. Narrow spectra
/// (monofractal or shuffled series) typically cross zero 0.5 to 1.1 spans out.
inline constexpr double kSpectrumExtension = 2.0;

/// Raised when the quartic fit of the spectrum has no zero crossing on one
/// side of its maximum, even on the extended range.
class SpectrumFitError : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

/// Quartic least-squares fit of f(alpha); alpha0 is the fit's maximum over the
/// data range, alpha1 < alpha0 < alpha2 the nearest zero crossings (searched up
/// to kSpectrumExtension spans beyond it). W = alpha2 - alpha1,
/// A = (alpha0 - alpha1) / (alpha2 - alpha0); H = h at q = 2.
MultifractalSummary spectrum_summary(const MultifractalSpectrum& spec, const GeneralizedHurst& gh);

struct MfdfaResult {
	FluctuationSurface surface;
	GeneralizedHurst hurst;
	MultifractalSpectrum spectrum;
	MultifractalSummary summary;
};

/// Everything up to the generalized Hurst exponents and spectrum, without the
/// summary fit (which may legitimately fail on near-monofractal series).
struct MfdfaCore {
	FluctuationSurface surface;
	GeneralizedHurst hurst;
	MultifractalSpectrum spectrum;
};

/// Requires length >= 2 * largest scale. `jobs` > 1 spreads the scale loop
/// over threads; results are identical to the sequential run.
MfdfaCore analyze_core(std::span<const double> x, const MfdfaConfig& cfg = {}, std::size_t jobs = 1);

MfdfaResult analyze(std::span<const double> x, const MfdfaConfig& cfg = {}, std::size_t jobs = 1);

inline MfdfaResult analyze(const core::TimeSeries& ts, const MfdfaConfig& cfg = {}, std::size_t jobs = 1) {
	return analyze(std::span<const double>(ts.values), cfg, jobs);
}

}  // namespace mfwind::mfdfa
