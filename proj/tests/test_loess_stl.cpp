#include "mfwind/core/random.hpp"
#include "mfwind/stl/loess.hpp"
#include "mfwind/stl/stl.hpp"

#include "support/oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

using namespace mfwind;
using Catch::Approx;

TEST_CASE("loess reproduces polynomials of its degree") {
	std::vector<double> line(200);
	for (std::size_t i = 0; i < line.size(); ++i) {
		line[i] = 2.5 - 0.03 * static_cast<double>(i);
	}
	for (int window : {3, 7, 25, 199, 401}) {
		const auto out = stl::loess_smooth(line, window, 1);
		for (std::size_t i = 0; i < line.size(); ++i) {
			REQUIRE(std::abs(out[i] - line[i]) < 1e-9);
		}
	}
	const std::vector<double> flat(50, 4.2);
	const auto out = stl::loess_smooth(flat, 5, 0);
	for (double v : out) {
		REQUIRE(std::abs(v - 4.2) < 1e-12);
	}
	std::vector<double> quad(120);
	for (std::size_t i = 0; i < quad.size(); ++i) {
		const double t = static_cast<double>(i);
		quad[i] = 1.0 + 0.5 * t - 0.01 * t * t;
	}
	const auto q = stl::loess_smooth(quad, 15, 2);
	for (std::size_t i = 0; i < quad.size(); ++i) {
		REQUIRE(std::abs(q[i] - quad[i]) < 1e-9);
	}
}

TEST_CASE("loess agrees with a per-point weighted least squares oracle") {
	core::Rng rng(11);
	std::vector<double> x(300);
	for (std::size_t i = 0; i < x.size(); ++i) {
		x[i] = std::sin(2.0 * std::numbers::pi * static_cast<double>(i) / 60.0) + 0.3 * rng.normal();
	}
	const auto out = stl::loess_smooth(x, 25, 1);
	for (int k = 0; k < 10; ++k) {
		const auto i = static_cast<std::size_t>(rng.below(x.size()));
		CHECK(std::abs(out[i] - oracle::loess_at(x, i, 25, 1)) < 1e-8);
	}
	// ends, where the window is shifted inwards
	CHECK(std::abs(out[0] - oracle::loess_at(x, 0, 25, 1)) < 1e-8);
	CHECK(std::abs(out[299] - oracle::loess_at(x, 299, 25, 1)) < 1e-8);
}

TEST_CASE("loess argument checks") {
	const std::vector<double> x(20, 1.0);
	CHECK_THROWS_AS(stl::loess_smooth(x, 2, 1), std::invalid_argument);
	CHECK_THROWS_AS(stl::loess_smooth(x, 3, 2), std::invalid_argument);
	CHECK_THROWS_AS(stl::loess_smooth(x, 5, 3), std::invalid_argument);
	std::vector<double> w(20, 1.0);
	w[3] = 1.5;
	CHECK_THROWS_AS(stl::loess_smooth(x, 5, 1, w), std::invalid_argument);
	CHECK_THROWS_AS(stl::loess_smooth(x, 5, 1, std::vector<double>(3, 1.0)), std::invalid_argument);
}

TEST_CASE("robustness weights downweight an outlier") {
	std::vector<double> x(41, 1.0);
	x[20] = 100.0;
	std::vector<double> w(41, 1.0);
	w[20] = 0.0;
	const auto out = stl::loess_smooth(x, 9, 1, w);
	CHECK(std::abs(out[20] - 1.0) < 1e-12);
}

TEST_CASE("stl defaults") {
	const auto cfg = stl::StlConfig{}.resolved();
	CHECK(cfg.trend_window == 549);
	CHECK(cfg.lowpass_window == 365);
	CHECK(stl::next_odd(4.0) == 5);
	CHECK(stl::next_odd(5.0) == 5);
	CHECK(stl::next_odd(5.2) == 7);
	stl::StlConfig bad;
	bad.seasonal_window = 6;
	CHECK_THROWS_AS(bad.resolved(), std::invalid_argument);
}

TEST_CASE("stl of a zero series is zero") {
	const std::vector<double> zero(800, 0.0);
	const auto d = stl::stl_decompose(zero);
	for (std::size_t i = 0; i < zero.size(); ++i) {
		REQUIRE(d.trend[i] == 0.0);
		REQUIRE(d.seasonal[i] == 0.0);
		REQUIRE(d.remainder[i] == 0.0);
	}
}

TEST_CASE("stl rejects series shorter than two periods") {
	CHECK_THROWS_AS(stl::stl_decompose(std::vector<double>(729, 1.0)), std::invalid_argument);
}

TEST_CASE("stl reconstruction identity on randomized inputs") {
	for (std::uint64_t seed = 1; seed <= 10; ++seed) {
		core::Rng rng(seed);
		stl::StlConfig cfg;
		cfg.period = 7 + static_cast<int>(rng.below(30));
		cfg.seasonal_window = 7 + 2 * static_cast<int>(rng.below(10));
		cfg.outer_iterations = static_cast<int>(rng.below(3));
		const auto n = static_cast<std::size_t>(2 * cfg.period + rng.below(300));
		std::vector<double> x(n);
		for (auto& v : x) {
			v = 5.0 + 3.0 * rng.normal() + (rng.uniform() < 0.02 ? 40.0 : 0.0);
		}
		const auto d = stl::stl_decompose(x, cfg);
		REQUIRE(d.trend.size() == n);
		for (std::size_t i = 0; i < n; ++i) {
			REQUIRE(std::abs(d.trend[i] + d.seasonal[i] + d.remainder[i] - x[i]) <= 1e-9);
		}
		for (double w : d.weights) {
			REQUIRE(w >= 0.0);
			REQUIRE(w <= 1.0);
		}
		if (cfg.outer_iterations == 0) {
			for (double w : d.weights) {
				REQUIRE(w == 1.0);
			}
		}
	}
}

TEST_CASE("stl recovers a sinusoid plus linear trend") {
	const std::size_t n = 5 * 365;
	std::vector<double> x(n);
	std::vector<double> season(n);
	for (std::size_t i = 0; i < n; ++i) {
		season[i] = std::sin(2.0 * std::numbers::pi * static_cast<double>(i) / 365.0);
		x[i] = 0.001 * static_cast<double>(i) + season[i];
	}
	const auto d = stl::stl_decompose(x);
	CHECK(oracle::correlation(d.seasonal, season) >= 0.99);
	const std::size_t lo = n / 10;
	const std::size_t hi = n - n / 10;
	for (std::size_t i = lo + 1; i < hi; ++i) {
		REQUIRE(d.trend[i] > d.trend[i - 1]);
	}
	const double bound = 0.05 * oracle::sd(x);
	for (std::size_t c = 0; c + 365 <= n; c += 365) {
		const double m = oracle::mean(std::span<const double>(d.seasonal).subspan(c, 365));
		REQUIRE(std::abs(m) <= bound);
	}
}
