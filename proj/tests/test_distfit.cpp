#include "mfwind/core/random.hpp"
#include "mfwind/distfit/density_estimate.hpp"
#include "mfwind/distfit/fit.hpp"
#include "mfwind/distfit/nelder_mead.hpp"

#include "support/oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace mfwind::distfit;
using Catch::Approx;

namespace {

EmpiricalDensity exact_curve(const Params& p, double lo, double hi, std::size_t points) {
	EmpiricalDensity e;
	e.bandwidth = (hi - lo) / static_cast<double>(points);
	for (std::size_t i = 0; i < points; ++i) {
		const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
		e.grid.push_back(x);
		e.density.push_back(density(p, x));
	}
	return e;
}

double quantile(const Params& p, double prob, double lo, double hi) {
	for (int i = 0; i < 200; ++i) {
		const double mid = 0.5 * (lo + hi);
		(cdf(p, mid) < prob ? lo : hi) = mid;
	}
	return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("closed-form densities") {
	CHECK(density(WeibullParams{1.0, 1.0}, 0.5) == Approx(std::exp(-0.5)).epsilon(1e-14));
	CHECK(density(WeibullParams{2.0, 3.0}, -1.0) == 0.0);
	CHECK(density(GammaParams{2.0, 1.0}, 1.0) == Approx(std::exp(-1.0)).epsilon(1e-14));
	CHECK(density(GammaParams{2.0, 1.0}, -0.1) == 0.0);
	// GEV off-support vanishes; Gumbel limit
	CHECK(density(GevParams{0.0, 1.0, 0.5}, -2.5) == 0.0);
	CHECK(density(GevParams{0.0, 1.0, 0.0}, 0.0) == Approx(std::exp(-1.0)).epsilon(1e-14));
	CHECK(density(GevParams{0.0, 1.0, 1e-12}, 0.3) == Approx(density(GevParams{0.0, 1.0, 0.0}, 0.3)).epsilon(1e-9));
	CHECK(cdf(GammaParams{3.0, 2.0}, 1.2) == Approx(1.0 - std::exp(-2.4) * (1.0 + 2.4 + 2.88)).epsilon(1e-12));
	CHECK(cdf(WeibullParams{2.0, 3.0}, 3.0) == Approx(1.0 - std::exp(-1.0)).epsilon(1e-14));
	CHECK(cdf(GevParams{1.0, 2.0, 0.2}, 1.0) == Approx(std::exp(-1.0)).epsilon(1e-14));
}

TEST_CASE("density agrees with the test-side formulas") {
	for (double x : {0.1, 0.7, 2.0, 5.5}) {
		CHECK(density(GammaParams{2.7, 1.3}, x) == Approx(oracle::gamma_pdf(2.7, 1.3, x)).epsilon(1e-12));
		CHECK(density(WeibullParams{1.7, 2.2}, x) == Approx(oracle::weibull_pdf(1.7, 2.2, x)).epsilon(1e-12));
	}
}

TEST_CASE("fitted densities integrate to one between extreme quantiles") {
	const std::vector<Params> params{WeibullParams{2.0, 3.0}, GammaParams{2.0, 1.0}, GevParams{3.0, 1.0, 0.1},
	                                 GevParams{3.0, 1.0, -0.2}, GammaParams{0.7, 2.0}};
	for (const auto& p : params) {
		const double lo = quantile(p, 1e-4, -50.0, 50.0);
		const double hi = quantile(p, 1.0 - 1e-4, -50.0, 200.0);
		std::vector<double> g;
		std::vector<double> d;
		for (int i = 0; i <= 20000; ++i) {
			// geometric spacing near a singular density at the lower end
			const double x = lo > 0.0 ? lo * std::pow(hi / lo, i / 20000.0) : lo + (hi - lo) * i / 20000.0;
			g.push_back(x);
			d.push_back(density(p, x));
		}
		CHECK(trapezoid(g, d) == Approx(1.0 - 2e-4).margin(1e-3));
	}
}

TEST_CASE("nelder-mead minimises a quadratic bowl") {
	auto f = [](const std::vector<double>& x) { return (x[0] - 1.0) * (x[0] - 1.0) + 10.0 * (x[1] + 2.0) * (x[1] + 2.0); };
	const auto r = nelder_mead(f, {0.0, 0.0}, {0.5, 0.5});
	CHECK(r.converged);
	CHECK(r.x[0] == Approx(1.0).margin(1e-5));
	CHECK(r.x[1] == Approx(-2.0).margin(1e-5));
	CHECK(r.value <= f({0.0, 0.0}));
}

TEST_CASE("maximum likelihood recovers generating parameters") {
	SECTION("Gamma(2, 1)") {
		const auto x = oracle::gamma_draws(2.0, 1.0, 100000, 1);
		const auto fit = fit_mle(x, Family::Gamma);
		const auto& p = std::get<GammaParams>(fit.params);
		CHECK(p.shape >= 1.95);
		CHECK(p.shape <= 2.05);
		CHECK(p.rate >= 0.95);
		CHECK(p.rate <= 1.05);
		CHECK(fit.sample_size == 100000);
	}
	SECTION("Weibull(2, 3)") {
		const auto x = oracle::weibull_draws(2.0, 3.0, 100000, 2);
		const auto p = std::get<WeibullParams>(fit_mle(x, Family::Weibull).params);
		CHECK(p.shape >= 1.96);
		CHECK(p.shape <= 2.04);
		CHECK(p.scale >= 2.97);
		CHECK(p.scale <= 3.03);
	}
	SECTION("Gumbel fitted as GEV") {
		const auto x = oracle::gev_draws(2.0, 1.5, 0.0, 100000, 3);
		const auto p = std::get<GevParams>(fit_mle(x, Family::Gev).params);
		CHECK(p.shape >= -0.03);
		CHECK(p.shape <= 0.03);
		CHECK(p.location == Approx(2.0).margin(0.03));
		CHECK(p.scale == Approx(1.5).margin(0.03));
	}
}

TEST_CASE("likelihood at the optimum is at least that of the starting values") {
	const std::vector<std::vector<double>> samples{oracle::gamma_draws(2.0, 1.0, 2000, 4),
	                                              oracle::weibull_draws(1.5, 2.0, 2000, 5),
	                                              oracle::gev_draws(3.0, 1.0, 0.1, 2000, 6)};
	for (const auto& s : samples) {
		for (auto family : {Family::Weibull, Family::Gamma, Family::Gev}) {
			const auto init = initial_estimate(s, family);
			const auto fit = fit_mle(s, family);
			CHECK(fit.valid());
			CHECK(fit.log_likelihood >= log_likelihood(init.params, s));
		}
	}
}

TEST_CASE("fit preconditions") {
	CHECK_THROWS_AS(fit_mle(std::vector<double>(10, 1.0), Family::Gamma), std::invalid_argument);
	auto x = oracle::gamma_draws(2.0, 1.0, 100, 7);
	x[5] = -1.0;
	CHECK_THROWS_AS(fit_mle(x, Family::Weibull), std::invalid_argument);
	CHECK_NOTHROW(fit_mle(x, Family::Gev));
}

TEST_CASE("kernel density integrates to one") {
	for (std::uint64_t seed = 1; seed <= 5; ++seed) {
		const auto x = oracle::gamma_draws(1.0 + static_cast<double>(seed), 1.0, 5000, seed);
		const auto e = kernel_density(x);
		CHECK(e.grid.size() == 512);
		CHECK(e.bandwidth > 0.0);
		const double area = trapezoid(e.grid, e.density);
		CHECK(area >= 0.99);
		CHECK(area <= 1.01);
		CHECK(e.grid.front() >= 0.0);
	}
	const auto normal = oracle::gev_draws(0.0, 1.0, 0.0, 3000, 9);
	const auto e = kernel_density(normal, 512, false);
	CHECK(e.grid.front() < 0.0);
	CHECK(trapezoid(e.grid, e.density) == Approx(1.0).margin(0.01));
}

TEST_CASE("kl divergence") {
	SECTION("identical exponentials") {
		const auto p = exact_curve(WeibullParams{1.0, 1.0}, 0.0, 30.0, 30001);
		CHECK(std::abs(kl_divergence(p, GammaParams{1.0, 1.0})) < 1e-4);
	}
	SECTION("gamma against gamma matches the closed form") {
		const auto p = exact_curve(GammaParams{3.0, 1.0}, 0.0, 40.0, 40001);
		CHECK(kl_divergence(p, GammaParams{2.0, 1.0}) ==
		      Approx(oracle::gamma_gamma_kl(3.0, 1.0, 2.0, 1.0)).margin(1e-3));
	}
	SECTION("numerically non-negative") {
		for (std::uint64_t seed = 1; seed <= 5; ++seed) {
			const auto x = oracle::weibull_draws(2.0, 3.0, 5000, seed);
			const auto e = kernel_density(x);
			for (const Params& q : {Params{WeibullParams{2.0, 3.0}}, Params{GammaParams{3.0, 1.0}},
			                        Params{GevParams{2.5, 1.2, -0.2}}}) {
				CHECK(kl_divergence(e, q) >= -1e-6);
			}
		}
	}
}

TEST_CASE("ranking picks the generating family") {
	const auto gev = oracle::gev_draws(3.0, 1.0, 0.1, 100000, 21);
	auto ranked = rank_distributions(gev);
	REQUIRE(ranked.size() == 3);
	CHECK(ranked[0].family == Family::Gev);
	CHECK(ranked[0].kl <= ranked[1].kl);
	CHECK(ranked[1].kl <= ranked[2].kl);
	const auto gamma = oracle::gamma_draws(2.0, 1.0, 100000, 22);
	ranked = rank_distributions(gamma);
	CHECK(ranked[0].family == Family::Gamma);
}

TEST_CASE("ranking is consistent: the true family has the smallest KL") {
	const std::vector<std::pair<Family, std::vector<double>>> cases{
	    {Family::Weibull, oracle::weibull_draws(2.0, 3.0, 100000, 31)},
	    {Family::Gamma, oracle::gamma_draws(2.0, 1.0, 100000, 32)}};
	for (const auto& [family, x] : cases) {
		const auto e = kernel_density(x);
		const double own = kl_divergence(e, fit_mle(x, family));
		for (auto other : {Family::Weibull, Family::Gamma, Family::Gev}) {
			if (other != family) {
				CHECK(own <= kl_divergence(e, fit_mle(x, other)));
			}
		}
	}
}

TEST_CASE("degenerate spread still gives finite KL values") {
	mfwind::core::Rng rng(3);
	std::vector<double> x(500);
	for (auto& v : x) {
		v = 5.0 + 1e-9 * rng.normal();
	}
	const auto ranked = rank_distributions(x);
	REQUIRE(ranked.size() == 3);
	for (const auto& r : ranked) {
		CHECK(std::isfinite(r.kl));
	}
}

TEST_CASE("family names round-trip") {
	for (auto f : {Family::Weibull, Family::Gamma, Family::Gev}) {
		CHECK(parse_family(family_name(f)) == f);
	}
	CHECK_THROWS(parse_family("lognormal"));
	DistributionFit fit{GevParams{1.0, 2.0, 0.1}, 0.0, 0};
	const auto named = fit.named_params();
	REQUIRE(named.size() == 3);
	CHECK(named[0].first == "mu");
	CHECK(named[2].first == "xi");
}
