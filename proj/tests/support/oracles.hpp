#pragma once

// Test-only reference implementations. Deliberately written the obvious way
// (raw Vandermonde least squares, <random> engines, direct formulas) so they
// share no code with the library.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <vector>

namespace oracle {

inline std::vector<double> gamma_draws(double shape, double rate, std::size_t n, std::uint64_t seed) {
	// Marsaglia-Tsang, shape >= 1.
	std::mt19937_64 gen(seed);
	std::normal_distribution<double> norm(0.0, 1.0);
	std::uniform_real_distribution<double> unif(0.0, 1.0);
	const double d = shape - 1.0 / 3.0;
	const double c = 1.0 / std::sqrt(9.0 * d);
	std::vector<double> out;
	out.reserve(n);
	while (out.size() < n) {
		double z = norm(gen);
		double v = 1.0 + c * z;
		if (v <= 0.0) {
			continue;
		}
		v = v * v * v;
		const double u = unif(gen);
		if (std::log(u) < 0.5 * z * z + d - d * v + d * std::log(v)) {
			out.push_back(d * v / rate);
		}
	}
	return out;
}

inline std::vector<double> weibull_draws(double k, double lambda, std::size_t n, std::uint64_t seed) {
	std::mt19937_64 gen(seed);
	std::uniform_real_distribution<double> unif(0.0, 1.0);
	std::vector<double> out(n);
	for (auto& x : out) {
		x = lambda * std::pow(-std::log1p(-unif(gen)), 1.0 / k);
	}
	return out;
}

inline std::vector<double> gev_draws(double mu, double sigma, double xi, std::size_t n, std::uint64_t seed) {
	std::mt19937_64 gen(seed);
	std::uniform_real_distribution<double> unif(0.0, 1.0);
	std::vector<double> out(n);
	for (auto& x : out) {
		double u = unif(gen);
		while (u <= 0.0) {
			u = unif(gen);
		}
		const double e = -std::log(u);
		x = std::abs(xi) < 1e-12 ? mu - sigma * std::log(e) : mu + sigma * (std::pow(e, -xi) - 1.0) / xi;
	}
	return out;
}

inline double gamma_pdf(double alpha, double beta, double x) {
	if (x < 0.0) {
		return 0.0;
	}
	return std::exp(alpha * std::log(beta) + (alpha - 1.0) * std::log(x) - beta * x - std::lgamma(alpha));
}

inline double weibull_pdf(double k, double lambda, double x) {
	if (x < 0.0) {
		return 0.0;
	}
	return k / lambda * std::pow(x / lambda, k - 1.0) * std::exp(-std::pow(x / lambda, k));
}

// KL(Gamma(a1, b1) || Gamma(a2, b2)), closed form.
inline double gamma_gamma_kl(double a1, double b1, double a2, double b2) {
	auto digamma = [](double x) {
		double r = 0.0;
		while (x < 6.0) {
			r -= 1.0 / x;
			x += 1.0;
		}
		const double f = 1.0 / (x * x);
		return r + std::log(x) - 0.5 / x - f * (1.0 / 12 - f * (1.0 / 120 - f * (1.0 / 252 - f * (1.0 / 240))));
	};
	return (a1 - a2) * digamma(a1) - std::lgamma(a1) + std::lgamma(a2) + a2 * (std::log(b1) - std::log(b2)) +
	       a1 * (b2 - b1) / b1;
}

// Residual variance (divisor s) of a degree-m least-squares polynomial fit to
// y[0..s) against abscissae 1..s, via a raw Vandermonde QR.
inline double window_variance(const double* y, std::size_t s, int m) {
	Eigen::MatrixXd v(static_cast<Eigen::Index>(s), m + 1);
	Eigen::VectorXd b(static_cast<Eigen::Index>(s));
	for (std::size_t i = 0; i < s; ++i) {
		for (int k = 0; k <= m; ++k) {
			v(static_cast<Eigen::Index>(i), k) = std::pow(static_cast<double>(i + 1), k);
		}
		b(static_cast<Eigen::Index>(i)) = y[i];
	}
	const Eigen::VectorXd c = v.colPivHouseholderQr().solve(b);
	return (v * c - b).squaredNorm() / static_cast<double>(s);
}

// Direct evaluation of the q-th order fluctuation function from variances.
inline double fq(std::span<const double> variances, double q) {
	double sum = 0.0;
	for (double v : variances) {
		sum += std::pow(v, q / 2.0);
	}
	return std::pow(sum / static_cast<double>(variances.size()), 1.0 / q);
}

// Loess estimate at index i: weighted least squares over the `window` nearest
// points with tricube weights, written out with an explicit neighbour search.
inline double loess_at(std::span<const double> x, std::size_t i, int window, int degree) {
	const auto n = static_cast<long>(x.size());
	long lo = static_cast<long>(i) - window / 2;
	lo = std::max(0L, std::min(lo, n - window));
	const long hi = lo + window - 1;
	const double h = std::max(static_cast<double>(i) - lo, static_cast<double>(hi) - static_cast<double>(i));
	Eigen::MatrixXd a(window, degree + 1);
	Eigen::VectorXd b(window);
	for (long j = lo; j <= hi; ++j) {
		const double r = std::abs(static_cast<double>(j) - static_cast<double>(i)) / h;
		double w = r < 1.0 ? std::pow(1.0 - r * r * r, 3) : 0.0;
		// netlib thresholds: full weight close in, none at the window edge
		if (r <= 0.001) {
			w = 1.0;
		} else if (r > 0.999) {
			w = 0.0;
		}
		const double sw = std::sqrt(w);
		for (int k = 0; k <= degree; ++k) {
			a(j - lo, k) = sw * std::pow(static_cast<double>(j) - static_cast<double>(i), k);
		}
		b(j - lo) = sw * x[static_cast<std::size_t>(j)];
	}
	const Eigen::VectorXd c = a.colPivHouseholderQr().solve(b);
	return c(0);
}

inline double mean(std::span<const double> v) {
	double s = 0.0;
	for (double x : v) {
		s += x;
	}
	return s / static_cast<double>(v.size());
}

inline double sd(std::span<const double> v) {
	const double m = mean(v);
	double s = 0.0;
	for (double x : v) {
		s += (x - m) * (x - m);
	}
	return std::sqrt(s / static_cast<double>(v.size() - 1));
}

inline double correlation(std::span<const double> a, std::span<const double> b) {
	const double ma = mean(a);
	const double mb = mean(b);
	double sab = 0.0;
	double saa = 0.0;
	double sbb = 0.0;
	for (std::size_t i = 0; i < a.size(); ++i) {
		sab += (a[i] - ma) * (b[i] - mb);
		saa += (a[i] - ma) * (a[i] - ma);
		sbb += (b[i] - mb) * (b[i] - mb);
	}
	return sab / std::sqrt(saa * sbb);
}

}  // namespace oracle
