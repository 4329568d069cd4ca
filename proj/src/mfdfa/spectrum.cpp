#include "mfwind/mfdfa/mfdfa.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <tuple>

namespace mfwind::mfdfa {

MultifractalSpectrum legendre_spectrum(const GeneralizedHurst& gh) {
	const auto& q = gh.q_grid;
	const auto n = q.size();
	if (n < 3) {
		throw std::invalid_argument("Legendre spectrum needs at least three q values");
	}
	MultifractalSpectrum spec;
	spec.q_grid = q;
	spec.tau.resize(n);
	for (std::size_t i = 0; i < n; ++i) {
		spec.tau[i] = q[i] * gh.h[i] - 1.0;
	}
	// Three-point derivative on a possibly non-uniform grid (exact for quadratics).
	for (std::size_t i = 1; i + 1 < n; ++i) {
		const double h1 = q[i] - q[i - 1];
		const double h2 = q[i + 1] - q[i];
		const double alpha = -h2 / (h1 * (h1 + h2)) * spec.tau[i - 1] + (h2 - h1) / (h1 * h2) * spec.tau[i] +
		                     h1 / (h2 * (h1 + h2)) * spec.tau[i + 1];
		spec.spectrum_q.push_back(q[i]);
		spec.alpha.push_back(alpha);
		spec.f_alpha.push_back(q[i] * alpha - spec.tau[i]);
	}
	return spec;
}

namespace {

struct ScaledQuartic {
	std::array<double, 5> a{};  // coefficients in u = (alpha - centre) / half_span
	double centre = 0.0;
	double half_span = 1.0;

	double operator()(double u) const {
		return (((a[4] * u + a[3]) * u + a[2]) * u + a[1]) * u + a[0];
	}
	double alpha(double u) const { return centre + half_span * u; }
};

// Bisection for a sign change of p in [lo, hi], p(lo) and p(hi) of opposite sign.
double bisect(const ScaledQuartic& p, double lo, double hi) {
	double f_lo = p(lo);
	for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
		const double mid = 0.5 * (lo + hi);
		const double f_mid = p(mid);
		if ((f_mid > 0.0) == (f_lo > 0.0)) {
			lo = mid;
			f_lo = f_mid;
		} else {
			hi = mid;
		}
	}
	return 0.5 * (lo + hi);
}

}  // namespace

MultifractalSummary spectrum_summary(const MultifractalSpectrum& spec, const GeneralizedHurst& gh) {
	const auto n = spec.alpha.size();
	if (n < 6) {
		throw std::invalid_argument("spectrum summary needs at least six (alpha, f) points");
	}
	MultifractalSummary summary;
	std::tie(summary.H, summary.H_stderr) = gh.at(2.0);

	const auto [min_it, max_it] = std::minmax_element(spec.alpha.begin(), spec.alpha.end());
	ScaledQuartic poly;
	poly.centre = 0.5 * (*min_it + *max_it);
	poly.half_span = 0.5 * (*max_it - *min_it);
	if (!(poly.half_span > 1e-9) || !std::isfinite(poly.half_span)) {
		throw SpectrumFitError("spectrum too flat or fit degenerate: alpha range " +
		                       std::to_string(2.0 * poly.half_span));
	}
	Eigen::MatrixXd design(n, 5);
	Eigen::VectorXd target(n);
	for (std::size_t i = 0; i < n; ++i) {
		const double u = (spec.alpha[i] - poly.centre) / poly.half_span;
		double p = 1.0;
		for (int k = 0; k < 5; ++k) {
			design(static_cast<Eigen::Index>(i), k) = p;
			p *= u;
		}
		target(static_cast<Eigen::Index>(i)) = spec.f_alpha[i];
	}
	const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
	if (qr.rank() < 5) {
		throw SpectrumFitError("spectrum too flat or fit degenerate: rank-deficient quartic fit");
	}
	const Eigen::VectorXd coef = qr.solve(target);
	for (int k = 0; k < 5; ++k) {
		poly.a[static_cast<std::size_t>(k)] = coef(k);
	}

	// Maximum of the fit over the data range: dense scan, then bisection on the
	// derivative (comparing values near a flat maximum only resolves sqrt(eps)).
	constexpr int kScan = 4000;
	double best_u = -1.0;
	double best_f = poly(-1.0);
	for (int i = 1; i <= kScan; ++i) {
		const double u = -1.0 + 2.0 * i / kScan;
		const double f = poly(u);
		if (f > best_f) {
			best_f = f;
			best_u = u;
		}
	}
	{
		ScaledQuartic slope;
		for (int k = 1; k < 5; ++k) {
			slope.a[static_cast<std::size_t>(k - 1)] = k * poly.a[static_cast<std::size_t>(k)];
		}
		const double lo = std::max(-1.0, best_u - 2.0 / kScan);
		const double hi = std::min(1.0, best_u + 2.0 / kScan);
		if (slope(lo) > 0.0 && slope(hi) < 0.0) {
			const double u = bisect(slope, lo, hi);
			if (poly(u) >= best_f) {
				best_u = u;
				best_f = poly(u);
			}
		}
	}
	if (!(best_f > 0.0)) {
		throw SpectrumFitError("spectrum too flat or fit degenerate: fitted maximum is not positive");
	}

	// Nearest zero crossings, scanning outwards past the data by
	// kSpectrumExtension spans. u = +-1 are the data ends.
	constexpr double kStep = 1e-3;
	constexpr double kReach = 1.0 + 2.0 * kSpectrumExtension;
	auto crossing = [&](double direction) -> std::optional<double> {
		double prev = best_u;
		for (double u = best_u + direction * kStep; direction * u <= kReach + 1e-12; u += direction * kStep) {
			if (poly(u) <= 0.0) {
				return direction < 0 ? bisect(poly, u, prev) : bisect(poly, prev, u);
			}
			prev = u;
		}
		return std::nullopt;
	};
	const auto left = crossing(-1.0);
	const auto right = crossing(1.0);
	if (!left || !right) {
		throw SpectrumFitError("spectrum too flat or fit degenerate: fewer than two zero crossings");
	}
	summary.alpha0 = poly.alpha(best_u);
	summary.alpha1 = poly.alpha(*left);
	summary.alpha2 = poly.alpha(*right);
	summary.W = summary.alpha2 - summary.alpha1;
	summary.A = (summary.alpha0 - summary.alpha1) / (summary.alpha2 - summary.alpha0);

	// Expand the scaled polynomial into powers of alpha.
	const double c = poly.centre;
	const double d = poly.half_span;
	for (int k = 0; k < 5; ++k) {
		const double scale = poly.a[static_cast<std::size_t>(k)] / std::pow(d, k);
		double binom = 1.0;
		for (int j = 0; j <= k; ++j) {
			summary.fit_coeffs[static_cast<std::size_t>(j)] += scale * binom * std::pow(-c, k - j);
			binom = binom * (k - j) / (j + 1);
		}
	}
	return summary;
}

}  // namespace mfwind::mfdfa
