#include "mfwind/mfdfa/mfdfa.hpp"

#include "mfwind/core/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace mfwind::mfdfa {

namespace {

constexpr double kVarianceFloor = 1e-300;

// Orthonormal basis (column-major, s rows, degree + 1 columns) of polynomials
// of the given degree on the window abscissae 1..s, built by modified
// Gram-Schmidt with one re-orthogonalisation pass on centred, scaled abscissae.
std::vector<double> window_basis(std::size_t s, int degree) {
	const auto cols = static_cast<std::size_t>(degree) + 1;
	std::vector<double> basis(s * cols);
	const double centre = 0.5 * static_cast<double>(s + 1);
	const double half = 0.5 * static_cast<double>(s - 1);
	for (std::size_t i = 0; i < s; ++i) {
		const double u = (static_cast<double>(i + 1) - centre) / half;
		double p = 1.0;
		for (std::size_t k = 0; k < cols; ++k) {
			basis[k * s + i] = p;
			p *= u;
		}
	}
	for (std::size_t k = 0; k < cols; ++k) {
		double* col = basis.data() + k * s;
		double original = 0.0;
		for (std::size_t i = 0; i < s; ++i) {
			original += col[i] * col[i];
		}
		original = std::sqrt(original);
		for (int pass = 0; pass < 2; ++pass) {
			for (std::size_t j = 0; j < k; ++j) {
				const double* prev = basis.data() + j * s;
				double dot = 0.0;
				for (std::size_t i = 0; i < s; ++i) {
					dot += prev[i] * col[i];
				}
				for (std::size_t i = 0; i < s; ++i) {
					col[i] -= dot * prev[i];
				}
			}
		}
		double norm = 0.0;
		for (std::size_t i = 0; i < s; ++i) {
			norm += col[i] * col[i];
		}
		norm = std::sqrt(norm);
		if (!(norm > 1e-10 * original)) {
			throw std::runtime_error("rank-deficient detrending fit at scale " + std::to_string(s));
		}
		for (std::size_t i = 0; i < s; ++i) {
			col[i] /= norm;
		}
	}
	return basis;
}

double window_variance(const double* y, std::size_t s, const std::vector<double>& basis, std::size_t cols,
                       std::vector<double>& resid) {
	std::copy(y, y + s, resid.begin());
	for (std::size_t k = 0; k < cols; ++k) {
		const double* q = basis.data() + k * s;
		double c = 0.0;
		for (std::size_t i = 0; i < s; ++i) {
			c += q[i] * resid[i];
		}
		for (std::size_t i = 0; i < s; ++i) {
			resid[i] -= c * q[i];
		}
	}
	double ss = 0.0;
	for (std::size_t i = 0; i < s; ++i) {
		ss += resid[i] * resid[i];
	}
	return ss / static_cast<double>(s);
}

}  // namespace

std::vector<double> default_q_grid() {
	std::vector<double> q;
	for (int i = -20; i <= 20; ++i) {
		if (i != 0) {
			q.push_back(0.25 * i);
		}
	}
	return q;
}

std::vector<std::size_t> log_spaced_scales(std::size_t min, std::size_t max, std::size_t count) {
	if (min < 1 || max < min || count < 1) {
		throw std::invalid_argument("invalid scale range");
	}
	std::vector<std::size_t> scales;
	if (count == 1 || min == max) {
		scales.push_back(min);
		return scales;
	}
	const double lo = std::log(static_cast<double>(min));
	const double hi = std::log(static_cast<double>(max));
	for (std::size_t j = 0; j < count; ++j) {
		const double v = std::exp(lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(count - 1));
		const auto s = static_cast<std::size_t>(std::llround(v));
		if (scales.empty() || scales.back() != s) {
			scales.push_back(s);
		}
	}
	return scales;
}

std::vector<std::size_t> dyadic_scales(std::size_t min, std::size_t max) {
	std::vector<std::size_t> scales;
	for (std::size_t s = 1; s <= max; s *= 2) {
		if (s >= min) {
			scales.push_back(s);
		}
	}
	return scales;
}

std::vector<std::size_t> MfdfaConfig::scales() const {
	if (!explicit_scales.empty()) {
		return explicit_scales;
	}
	return log_spaced_scales(scale_min, scale_max, n_scales);
}

void MfdfaConfig::validate() const {
	if (detrend_degree < 1) {
		throw std::invalid_argument("detrending degree must be >= 1");
	}
	if (q_grid.size() < 3) {
		throw std::invalid_argument("q grid needs at least three values");
	}
	for (std::size_t i = 0; i < q_grid.size(); ++i) {
		if (!std::isfinite(q_grid[i]) || q_grid[i] == 0.0) {
			throw std::invalid_argument("q grid values must be finite and non-zero");
		}
		if (i > 0 && !(q_grid[i] > q_grid[i - 1])) {
			throw std::invalid_argument("q grid must be strictly increasing");
		}
	}
	const auto s = scales();
	if (s.size() < 4) {
		throw std::invalid_argument("at least four distinct scales are required");
	}
	for (std::size_t i = 0; i < s.size(); ++i) {
		if (s[i] < static_cast<std::size_t>(detrend_degree) + 2) {
			throw std::invalid_argument("scale " + std::to_string(s[i]) + " below detrending degree + 2");
		}
		if (i > 0 && s[i] <= s[i - 1]) {
			throw std::invalid_argument("scales must be strictly increasing");
		}
	}
}

std::vector<double> profile(std::span<const double> x) {
	if (x.empty()) {
		return {};
	}
	const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
	std::vector<double> y(x.size());
	double sum = 0.0;
	for (std::size_t i = 0; i < x.size(); ++i) {
		sum += x[i] - mean;
		y[i] = sum;
	}
	return y;
}

std::vector<double> segment_variances(std::span<const double> y, std::size_t s, int degree) {
	if (degree < 0) {
		throw std::invalid_argument("detrending degree must be non-negative");
	}
	if (s < static_cast<std::size_t>(degree) + 2) {
		throw std::invalid_argument("window length must be at least degree + 2");
	}
	const std::size_t n = y.size();
	const std::size_t ns = n / s;
	if (ns < 2) {
		throw std::invalid_argument("series of length " + std::to_string(n) + " too short for scale " +
		                            std::to_string(s));
	}
	const auto basis = window_basis(s, degree);
	const auto cols = static_cast<std::size_t>(degree) + 1;
	std::vector<double> resid(s);
	std::vector<double> out(2 * ns);
	for (std::size_t v = 0; v < ns; ++v) {
		out[v] = window_variance(y.data() + v * s, s, basis, cols, resid);
	}
	for (std::size_t v = 0; v < ns; ++v) {
		out[ns + v] = window_variance(y.data() + n - (v + 1) * s, s, basis, cols, resid);
	}
	return out;
}

FluctuationSurface fluctuation_function(const std::vector<std::vector<double>>& variances,
                                        const std::vector<std::size_t>& scales, const std::vector<double>& q_grid) {
	if (variances.size() != scales.size()) {
		throw std::invalid_argument("one variance array per scale expected");
	}
	FluctuationSurface surface;
	surface.scales = scales;
	surface.q_grid = q_grid;
	surface.values.assign(q_grid.size() * scales.size(), 0.0);
	surface.n_segments_per_scale.resize(scales.size());

	std::vector<double> log_var;
	std::vector<double> term;
	std::vector<double> factor;
	for (std::size_t j = 0; j < scales.size(); ++j) {
		const auto& v = variances[j];
		if (v.empty()) {
			throw std::invalid_argument("no windows at scale " + std::to_string(scales[j]));
		}
		surface.n_segments_per_scale[j] = v.size();
		log_var.resize(v.size());
		std::size_t zeros = 0;
		for (std::size_t i = 0; i < v.size(); ++i) {
			double value = v[i];
			if (value <= 0.0) {
				++zeros;
			}
			if (!(value >= kVarianceFloor)) {
				value = kVarianceFloor;
				++surface.floored_variances;
			}
			log_var[i] = std::log(value);
		}
		if (zeros == v.size()) {
			throw std::invalid_argument("all window variances vanish at scale " + std::to_string(scales[j]) +
			                            " (degenerate series)");
		}
		const double log_count = std::log(static_cast<double>(v.size()));
		const auto [lv_min, lv_max] = std::minmax_element(log_var.begin(), log_var.end());
		auto store = [&](std::size_t k, double log_f) { surface.values[k * scales.size() + j] = std::exp(log_f); };

		// ln F_q = (1/q) ln( mean_v exp((q/2) ln F^2(v)) ), with the largest term
		// factored out. Walking outwards from q = 0 on each side, the terms for the
		// next q are the previous ones times exp((dq/2)(ln F^2(v) - ref)); on an
		// evenly spaced grid that factor is the same for every step.
		auto branch = [&](bool positive) {
			const double ref = positive ? *lv_max : *lv_min;
			double prev_q = 0.0;
			double prev_dq = std::numeric_limits<double>::quiet_NaN();
			bool first = true;
			const auto nq = q_grid.size();
			for (std::size_t step = 0; step < nq; ++step) {
				const std::size_t k = positive ? step : nq - 1 - step;
				const double q = q_grid[k];
				if (positive ? !(q > 0.0) : !(q < 0.0)) {
					continue;
				}
				const double dq = q - prev_q;
				if (first || dq != prev_dq) {
					for (std::size_t i = 0; i < log_var.size(); ++i) {
						factor[i] = std::exp(0.5 * dq * (log_var[i] - ref));
					}
				}
				double sum = 0.0;
				for (std::size_t i = 0; i < log_var.size(); ++i) {
					term[i] = first ? factor[i] : term[i] * factor[i];
					sum += term[i];
				}
				store(k, (0.5 * q * ref + std::log(sum) - log_count) / q);
				first = false;
				prev_q = q;
				prev_dq = dq;
			}
		};
		term.resize(log_var.size());
		factor.resize(log_var.size());
		branch(true);
		branch(false);
		for (std::size_t k = 0; k < q_grid.size(); ++k) {
			if (q_grid[k] == 0.0) {
				store(k, 0.5 * std::accumulate(log_var.begin(), log_var.end(), 0.0) / static_cast<double>(v.size()));
			}
		}
	}
	return surface;
}

std::pair<double, double> GeneralizedHurst::at(double q) const {
	for (std::size_t i = 0; i < q_grid.size(); ++i) {
		if (std::abs(q_grid[i] - q) <= 1e-12) {
			return {h[i], std_error[i]};
		}
	}
	throw std::invalid_argument("q = " + std::to_string(q) + " not in the q grid");
}

GeneralizedHurst generalized_hurst(const FluctuationSurface& surface) {
	const auto ns = surface.scales.size();
	if (ns < 4) {
		throw std::invalid_argument("generalized Hurst exponents need at least four scales");
	}
	std::vector<double> log_s(ns);
	for (std::size_t j = 0; j < ns; ++j) {
		log_s[j] = std::log(static_cast<double>(surface.scales[j]));
	}
	const double mean_x = std::accumulate(log_s.begin(), log_s.end(), 0.0) / static_cast<double>(ns);
	double sxx = 0.0;
	for (double x : log_s) {
		sxx += (x - mean_x) * (x - mean_x);
	}

	GeneralizedHurst gh;
	gh.q_grid = surface.q_grid;
	const auto nq = surface.q_grid.size();
	gh.h.resize(nq);
	gh.std_error.resize(nq);
	gh.r2.resize(nq);
	std::vector<double> log_f(ns);
	for (std::size_t k = 0; k < nq; ++k) {
		for (std::size_t j = 0; j < ns; ++j) {
			log_f[j] = std::log(surface.at(k, j));
			if (!std::isfinite(log_f[j])) {
				throw std::runtime_error("non-finite log fluctuation at scale " + std::to_string(surface.scales[j]));
			}
		}
		const double mean_y = std::accumulate(log_f.begin(), log_f.end(), 0.0) / static_cast<double>(ns);
		double sxy = 0.0;
		double syy = 0.0;
		for (std::size_t j = 0; j < ns; ++j) {
			sxy += (log_s[j] - mean_x) * (log_f[j] - mean_y);
			syy += (log_f[j] - mean_y) * (log_f[j] - mean_y);
		}
		const double slope = sxy / sxx;
		const double intercept = mean_y - slope * mean_x;
		double sse = 0.0;
		for (std::size_t j = 0; j < ns; ++j) {
			const double r = log_f[j] - (intercept + slope * log_s[j]);
			sse += r * r;
		}
		gh.h[k] = slope;
		gh.std_error[k] = std::sqrt(sse / static_cast<double>(ns - 2) / sxx);
		gh.r2[k] = syy > 0.0 ? 1.0 - sse / syy : 1.0;
	}
	return gh;
}

MfdfaCore analyze_core(std::span<const double> x, const MfdfaConfig& cfg, std::size_t jobs) {
	cfg.validate();
	const auto scales = cfg.scales();
	if (x.size() < 2 * scales.back()) {
		throw std::invalid_argument("series length " + std::to_string(x.size()) + " below twice the largest scale (" +
		                            std::to_string(scales.back()) + ")");
	}
	for (double v : x) {
		if (!std::isfinite(v)) {
			throw std::invalid_argument("series contains non-finite values");
		}
	}
	const auto y = profile(x);
	std::vector<std::vector<double>> variances(scales.size());
	core::parallel_for(scales.size(), jobs, [&](std::size_t j) {
		variances[j] = segment_variances(y, scales[j], cfg.detrend_degree);
	});
	MfdfaCore out;
	out.surface = fluctuation_function(variances, scales, cfg.q_grid);
	out.hurst = generalized_hurst(out.surface);
	out.spectrum = legendre_spectrum(out.hurst);
	return out;
}

MfdfaResult analyze(std::span<const double> x, const MfdfaConfig& cfg, std::size_t jobs) {
	auto core = analyze_core(x, cfg, jobs);
	MfdfaResult out;
	out.summary = spectrum_summary(core.spectrum, core.hurst);
	out.surface = std::move(core.surface);
	out.hurst = std::move(core.hurst);
	out.spectrum = std::move(core.spectrum);
	return out;
}

}  // namespace mfwind::mfdfa
