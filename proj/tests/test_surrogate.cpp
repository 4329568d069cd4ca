#include "mfwind/surrogate/surrogate.hpp"
#include "mfwind/synth/synth.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

using namespace mfwind;
using Catch::Approx;

TEST_CASE("shuffle is a seeded permutation") {
	CHECK(surrogate::shuffle(std::vector<double>{4.2}, 9) == std::vector<double>{4.2});
	CHECK(surrogate::shuffle(std::vector<double>{}, 9).empty());
	const auto x = synth::white_noise(1000, 1).values;
	const auto a = surrogate::shuffle(x, 77);
	const auto b = surrogate::shuffle(x, 77);
	CHECK(a == b);
	CHECK(a != surrogate::shuffle(x, 78));
	auto sa = a;
	auto sx = x;
	std::sort(sa.begin(), sa.end());
	std::sort(sx.begin(), sx.end());
	CHECK(sa == sx);
}

TEST_CASE("shuffle golden output") {
	std::vector<double> x(10);
	for (std::size_t i = 0; i < x.size(); ++i) {
		x[i] = static_cast<double>(i);
	}
	// recorded once from std::mt19937_64(2024) with the library's Fisher-Yates
	const std::vector<double> golden{1, 3, 6, 0, 2, 8, 7, 5, 9, 4};
	CHECK(surrogate::shuffle(x, 2024) == golden);
}

TEST_CASE("mean and spread") {
	const auto s = surrogate::mean_std(std::vector<double>{0.4, 0.6});
	CHECK(s.mean == Approx(0.5));
	CHECK(s.std == Approx(std::sqrt(0.02)));
	CHECK(surrogate::mean_std(std::vector<double>{1.0}).std == 0.0);
}

TEST_CASE("significance") {
	const std::vector<double> sur{1.0, 2.0, 3.0, 4.0, 5.0};
	const auto null = surrogate::significance(3.0, sur);
	REQUIRE(null.z);
	CHECK(*null.z == Approx(0.0).margin(1e-15));
	CHECK(null.percentile == Approx(0.5));
	const auto sd = surrogate::mean_std(sur).std;
	const auto two = surrogate::significance(3.0 + 2.0 * sd, sur);
	CHECK(*two.z == Approx(2.0));
	CHECK(two.percentile == 1.0);
	CHECK(two.p_two_sided == 0.0);
	const auto flat = surrogate::significance(1.0, std::vector<double>{2.0, 2.0, 2.0});
	CHECK_FALSE(flat.z);
	CHECK(flat.percentile == 0.0);
}

TEST_CASE("ensemble mechanics") {
	const auto x = synth::white_noise(4096, 3).values;
	SECTION("n = 2 averages the two runs") {
		const auto e = surrogate::surrogate_ensemble(x, {}, 2, 10);
		REQUIRE(e.H_values.size() == 2);
		CHECK(e.H.mean == Approx(0.5 * (e.H_values[0] + e.H_values[1])));
		CHECK(e.W.mean == Approx(0.5 * (e.W_values[0] + e.W_values[1])));
		// surrogate i uses seed base + i
		const auto single = mfdfa::analyze(surrogate::shuffle(x, 11));
		CHECK(e.H_values[1] == single.summary.H);
	}
	SECTION("identical regardless of parallel width") {
		const auto a = surrogate::surrogate_ensemble(x, {}, 12, 5, 1);
		const auto b = surrogate::surrogate_ensemble(x, {}, 12, 5, 3);
		CHECK(a.H_values == b.H_values);
		CHECK(a.W_values == b.W_values);
		CHECK(a.A_values == b.A_values);
		CHECK(a.H.mean == b.H.mean);
	}
	SECTION("n below 2 is rejected") {
		CHECK_THROWS_AS(surrogate::surrogate_ensemble(x, {}, 1, 5), std::invalid_argument);
	}
}

TEST_CASE("white-noise surrogates peak at one half") {
	const auto x = synth::white_noise(65536, 4).values;
	const auto e = surrogate::surrogate_ensemble(x, {}, 100, 1);
	CHECK(e.n_failed <= 20);
	CHECK(e.H.mean >= 0.47);
	CHECK(e.H.mean <= 0.53);
	CHECK(e.H.std >= 0.0);
}

TEST_CASE("cascade persistence is significant against its surrogates") {
	const auto c = synth::binomial_cascade({16, 0.75, 0}).values;
	const auto e = surrogate::surrogate_ensemble(c, {}, 100, 1);
	const auto rep = surrogate::significance(e);
	CHECK(e.original.H - e.H.mean > 3.0 * e.H.std);
	REQUIRE(rep.H.z);
	CHECK(*rep.H.z > 3.0);
}

TEST_CASE("white-noise originals fall inside the surrogate interval") {
	// null calibration at reduced size: 2^13 samples, 40 surrogates per trial.
	// The original is exchangeable with its surrogates, so it lies outside
	// [min, max] of 40 with probability 2/41; a failed summary counts as outside.
	int inside = 0;
	const int trials = 100;
	for (int t = 0; t < trials; ++t) {
		const auto x = synth::white_noise(8192, 1000 + static_cast<std::uint64_t>(t)).values;
		try {
			const auto e = surrogate::surrogate_ensemble(x, {}, 40, 1);
			auto h = e.H_values;
			std::sort(h.begin(), h.end());
			const double lo = h[static_cast<std::size_t>(std::floor(0.025 * static_cast<double>(h.size() - 1)))];
			const double hi = h[static_cast<std::size_t>(std::ceil(0.975 * static_cast<double>(h.size() - 1)))];
			if (e.original.H >= lo && e.original.H <= hi) {
				++inside;
			}
		} catch (const std::exception& e) {
			UNSCOPED_INFO("trial " << t << ": " << e.what());
		}
	}
	CHECK(inside >= 87);
}
