// Acceptance run: one PASS/FAIL line per criterion. Pass criterion numbers as
// arguments to run a subset. Exit status is non-zero if any criterion fails.

#include "mfwind/core/random.hpp"
#include "mfwind/distfit/fit.hpp"
#include "mfwind/elm/elm.hpp"
#include "mfwind/mfdfa/mfdfa.hpp"
#include "mfwind/pipeline/config.hpp"
#include "mfwind/pipeline/pipeline.hpp"
#include "mfwind/stl/stl.hpp"
#include "mfwind/surrogate/surrogate.hpp"
#include "mfwind/synth/synth.hpp"

#include "support/oracles.hpp"
#include "support/stations.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace mfwind;

namespace {

// Tolerances, as stated by the criteria.
constexpr double kCascadeTol = 0.10;
constexpr double kCascadeSeconds = 30.0;
constexpr double kNullMeanLo = 0.48;
constexpr double kNullMeanHi = 0.52;
constexpr double kNullStd = 0.03;
constexpr double kFgnLo = 0.75;
constexpr double kFgnHi = 0.85;
constexpr double kZ = 3.0;
constexpr int kFgnTrials = 100;
constexpr int kFgnRequired = 95;
constexpr int kPairedTrials = 20;
constexpr int kPairedRequired = 18;
constexpr double kStlReconstruction = 1e-9;
constexpr double kSeasonalR = 0.99;
constexpr int kRankSeeds = 10;
constexpr int kRankRequired = 9;
constexpr double kTrueKl = 0.01;
constexpr double kOrthogonality = 1e-8;
constexpr double kSquareRmse = 1e-6;
constexpr double kSmoothR2 = 0.8;
constexpr double kPermutedR2 = 0.1;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
	return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool c1_cascade() {
	const auto x = synth::binomial_cascade({16, 0.75, 0}).values;
	mfdfa::MfdfaConfig cfg;
	cfg.explicit_scales = mfdfa::dyadic_scales(16, 4096);
	const auto t0 = Clock::now();
	const auto core = mfdfa::analyze_core(x, cfg, 1);
	const double elapsed = seconds_since(t0);
	double worst = 0.0;
	double worst_q = 0.0;
	double mean_bias = 0.0;
	for (std::size_t i = 0; i < core.hurst.q_grid.size(); ++i) {
		const double q = core.hurst.q_grid[i];
		const double d = core.hurst.h[i] - synth::analytic_cascade_hurst(0.75, q);
		mean_bias += d / static_cast<double>(core.hurst.q_grid.size());
		if (std::abs(d) > std::abs(worst)) {
			worst = d;
			worst_q = q;
		}
	}
	std::printf("  max |h - analytic| = %.4f at q = %+.1f (tolerance %.2f), mean deviation %+.4f, %.2f s\n",
	            std::abs(worst), worst_q, kCascadeTol, mean_bias, elapsed);
	return std::abs(worst) <= kCascadeTol && elapsed < kCascadeSeconds;
}

bool c2_null() {
	std::vector<double> h;
	int failed = 0;
	for (std::uint64_t seed = 1; seed <= 100; ++seed) {
		const auto x = synth::white_noise(65536, seed).values;
		try {
			h.push_back(mfdfa::analyze(x).summary.H);
		} catch (const std::exception&) {
			++failed;
		}
	}
	const double m = oracle::mean(h);
	const double s = oracle::sd(h);
	std::printf("  mean H = %.4f, std H = %.4f over %zu series (%d summary failures)\n", m, s, h.size(), failed);
	return failed == 0 && m >= kNullMeanLo && m <= kNullMeanHi && s < kNullStd;
}

bool c3_persistence() {
	int ok = 0;
	double h_min = 1.0;
	double h_max = 0.0;
	double z_min = 1e300;
	for (int t = 0; t < kFgnTrials; ++t) {
		const auto seed = 5000 + static_cast<std::uint64_t>(t);
		const auto x = synth::fractional_noise(0.8, 65536, seed).values;
		try {
			const auto ens = surrogate::surrogate_ensemble(x, {}, 100, seed * 1000);
			const auto rep = surrogate::significance(ens);
			const double h = ens.original.H;
			const double z = rep.H.z ? *rep.H.z : 0.0;
			h_min = std::min(h_min, h);
			h_max = std::max(h_max, h);
			z_min = std::min(z_min, z);
			if (h >= kFgnLo && h <= kFgnHi && z > kZ) {
				++ok;
			}
		} catch (const std::exception& e) {
			std::printf("  trial %d: %s\n", t, e.what());
		}
	}
	std::printf("  %d of %d trials with H in [%.2f, %.2f] and z > %.0f (H range %.3f..%.3f, min z %.1f)\n", ok,
	            kFgnTrials, kFgnLo, kFgnHi, kZ, h_min, h_max, z_min);
	return ok >= kFgnRequired;
}

bool c4_separation() {
	const auto cascade = mfdfa::analyze(synth::binomial_cascade({16, 0.75, 0}).values).summary;
	int wider = 0;
	int skewed = 0;
	for (int t = 0; t < kPairedTrials; ++t) {
		const auto seed = 700 + static_cast<std::uint64_t>(t);
		// the cascade is deterministic; each pair differs only in its fGn partner
		const auto fgn = mfdfa::analyze(synth::fractional_noise(0.8, 65536, seed).values).summary;
		wider += cascade.W > fgn.W ? 1 : 0;
		skewed += cascade.A > 1.0 ? 1 : 0;
	}
	std::printf("  W(cascade) = %.3f wider than W(fGn) in %d/%d, A(cascade) = %.3f > 1 in %d/%d\n", cascade.W, wider,
	            kPairedTrials, cascade.A, skewed, kPairedTrials);
	return wider >= kPairedRequired && skewed >= kPairedRequired;
}

bool c5_stl() {
	double worst = 0.0;
	core::Rng rng(55);
	for (int t = 0; t < 50; ++t) {
		const int period = 7 + static_cast<int>(rng.below(60));
		const auto n = static_cast<std::size_t>(period) * (2 + rng.below(8)) + rng.below(static_cast<std::uint64_t>(period));
		std::vector<double> x(n);
		for (auto& v : x) {
			v = 10.0 * rng.normal();
		}
		stl::StlConfig cfg;
		cfg.period = period;
		cfg.seasonal_window = 7 + 2 * static_cast<int>(rng.below(20));
		cfg.outer_iterations = static_cast<int>(rng.below(3));
		const auto d = stl::stl_decompose(x, cfg);
		for (std::size_t i = 0; i < n; ++i) {
			worst = std::max(worst, std::abs(d.trend[i] + d.seasonal[i] + d.remainder[i] - x[i]));
		}
	}
	const std::size_t n = 365 * 5;
	std::vector<double> x(n);
	std::vector<double> season(n);
	core::Rng noise(56);
	for (std::size_t i = 0; i < n; ++i) {
		season[i] = 3.0 * std::sin(2.0 * std::numbers::pi * static_cast<double>(i) / 365.0);
		x[i] = 5.0 + 0.002 * static_cast<double>(i) + season[i] + 0.3 * noise.normal();
	}
	const auto d = stl::stl_decompose(x);
	const double r = oracle::correlation(d.seasonal, season);
	std::printf("  max reconstruction error %.2e over 50 inputs (tolerance %.0e), seasonal r = %.5f\n", worst,
	            kStlReconstruction, r);
	return worst <= kStlReconstruction && r >= kSeasonalR;
}

bool c6_ranking() {
	struct Case {
		distfit::Family family;
		std::function<std::vector<double>(std::uint64_t)> draw;
	};
	const std::vector<Case> cases{
	    {distfit::Family::Weibull, [](std::uint64_t s) { return oracle::weibull_draws(2.0, 3.0, 100000, s); }},
	    {distfit::Family::Gamma, [](std::uint64_t s) { return oracle::gamma_draws(2.0, 1.0, 100000, s); }},
	    {distfit::Family::Gev, [](std::uint64_t s) { return oracle::gev_draws(3.0, 1.0, 0.1, 100000, s); }},
	};
	bool pass = true;
	for (const auto& c : cases) {
		int first = 0;
		double worst_kl = 0.0;
		for (int seed = 1; seed <= kRankSeeds; ++seed) {
			const auto sample = c.draw(static_cast<std::uint64_t>(seed) * 7919);
			const auto ranked = distfit::rank_distributions(sample);
			first += ranked.front().family == c.family ? 1 : 0;
			for (const auto& r : ranked) {
				if (r.family == c.family) {
					worst_kl = std::max(worst_kl, r.ok() ? r.kl : 1e300);
				}
			}
		}
		std::printf("  %-7s first in %d/%d seeds, worst KL of the true family %.2e (limit %.2g)\n",
		            std::string(distfit::family_name(c.family)).c_str(), first, kRankSeeds, worst_kl, kTrueKl);
		pass = pass && first >= kRankRequired && worst_kl < kTrueKl;
	}
	return pass;
}

Eigen::MatrixXd random_points(std::size_t n, core::Rng& rng, double x0, double x1, double y0, double y1) {
	Eigen::MatrixXd x(static_cast<Eigen::Index>(n), 2);
	for (Eigen::Index i = 0; i < x.rows(); ++i) {
		x(i, 0) = rng.uniform(x0, x1);
		x(i, 1) = rng.uniform(y0, y1);
	}
	return x;
}

bool c7_elm() {
	double worst_orth = 0.0;
	for (std::uint64_t seed = 1; seed <= 20; ++seed) {
		core::Rng rng(seed + 300);
		const auto n = 20 + rng.below(150);
		const auto hidden = 1 + rng.below(n + 20);
		const auto x = random_points(n, rng, -50.0, 80.0, 0.0, 1.0);
		Eigen::VectorXd y(static_cast<Eigen::Index>(n));
		for (Eigen::Index i = 0; i < y.size(); ++i) {
			y(i) = rng.normal();
		}
		const auto m = elm::train_elm(x, y, hidden, seed);
		const auto h = elm::hidden_layer(m, x);
		const double rel = (h.transpose() * (h * m.output_weights - y)).norm() / (h.transpose() * y).norm();
		worst_orth = std::max(worst_orth, rel);
	}
	double worst_square = 0.0;
	for (std::size_t n : {4, 6, 9, 12}) {
		core::Rng rng(n);
		const auto x = random_points(n, rng, 0.0, 1.0, 0.0, 1.0);
		Eigen::VectorXd y(static_cast<Eigen::Index>(n));
		for (Eigen::Index i = 0; i < y.size(); ++i) {
			y(i) = std::cos(4.0 * x(i, 0)) * x(i, 1) + rng.normal();
		}
		const auto m = elm::train_elm(x, y, n, 17);
		const double rmse = std::sqrt((elm::predict(m, x) - y).squaredNorm() / static_cast<double>(n));
		const double sd = std::sqrt((y.array() - y.mean()).square().sum() / static_cast<double>(n - 1));
		worst_square = std::max(worst_square, rmse / sd);
	}
	std::printf("  worst relative |H'(H b - y)| = %.2e (limit %.0e), worst square-case RMSE/sd = %.2e (limit %.0e)\n",
	            worst_orth, kOrthogonality, worst_square, kSquareRmse);
	return worst_orth <= kOrthogonality && worst_square < kSquareRmse;
}

std::string slurp(const std::filesystem::path& p) {
	std::ifstream in(p, std::ios::binary);
	std::ostringstream s;
	s << in.rdbuf();
	return s.str();
}

bool c8_determinism() {
	const auto root = stations::fresh_dir("mfwind_acceptance_determinism");
	stations::write_set(root, 12, 8192);
	nlohmann::json j = {{"input_dir", "input"},
	                    {"catalog", "catalog.csv"},
	                    {"output_dir", "out"},
	                    {"surrogate", {{"n", 20}, {"base_seed", 11}}},
	                    {"map", {{"candidates", {2, 4, 8}}, {"min_stations", 10}, {"resolution", 5000.0}}}};
	auto cfg = pipeline::config_from_json(j, root);
	struct Snapshot {
		std::string summary;
		std::string manifest;
		int exit_code = -1;
	};
	auto run = [&](std::size_t jobs, const std::string& out) {
		cfg.jobs = jobs;
		cfg.output_dir = root / out;
		const auto r = pipeline::run_pipeline(cfg);
		return Snapshot{slurp(cfg.output_dir / "summary.csv"), slurp(cfg.output_dir / "manifest.json"), r.exit_code};
	};
	const auto a = run(1, "seq");
	const auto b = run(1, "seq_again");
	const auto c = run(8, "par");
	const bool rerun = a.summary == b.summary && a.manifest == b.manifest;
	const bool parallel = a.summary == c.summary && a.manifest == c.manifest;
	const auto rows = std::count(a.summary.begin(), a.summary.end(), '\n') - 1;
	std::printf("  %ld stations summarised, rerun identical: %s, jobs=8 identical to jobs=1: %s\n",
	            static_cast<long>(rows), rerun ? "yes" : "no", parallel ? "yes" : "no");
	std::filesystem::remove_all(root);
	return a.exit_code == 0 && rerun && parallel;
}

bool c9_mapping() {
	// smooth field over a Swiss-sized extent (metres)
	const double x0 = 2480000.0;
	const double x1 = 2830000.0;
	const double y0 = 1075000.0;
	const double y1 = 1300000.0;
	auto field = [&](double x, double y) {
		const double u = (x - x0) / (x1 - x0);
		const double v = (y - y0) / (y1 - y0);
		return 0.6 + 0.15 * std::sin(2.5 * u + 0.5) * std::cos(2.0 * v) + 0.1 * u * v;
	};
	double smooth_sum = 0.0;
	double smooth_min = 1.0;
	double permuted_sum = 0.0;
	const int seeds = 20;
	for (int s = 1; s <= seeds; ++s) {
		core::Rng rng(static_cast<std::uint64_t>(s) * 101);
		const auto x = random_points(119, rng, x0, x1, y0, y1);
		Eigen::VectorXd y(119);
		for (Eigen::Index i = 0; i < 119; ++i) {
			y(i) = field(x(i, 0), x(i, 1));
		}
		const auto seed = static_cast<std::uint64_t>(s);
		const auto smooth = elm::select_hidden_nodes(x, y, elm::kDefaultCandidates, 0.2, seed);
		std::vector<std::size_t> perm(119);
		for (std::size_t i = 0; i < perm.size(); ++i) {
			perm[i] = i;
		}
		for (std::size_t i = perm.size() - 1; i > 0; --i) {
			std::swap(perm[i], perm[rng.below(i + 1)]);
		}
		Eigen::VectorXd yp(119);
		for (Eigen::Index i = 0; i < 119; ++i) {
			yp(i) = y(static_cast<Eigen::Index>(perm[static_cast<std::size_t>(i)]));
		}
		const auto permuted = elm::select_hidden_nodes(x, yp, elm::kDefaultCandidates, 0.2, seed);
		smooth_sum += smooth.best_test_r2;
		smooth_min = std::min(smooth_min, smooth.best_test_r2);
		permuted_sum += permuted.best_test_r2;
	}
	const double smooth_mean = smooth_sum / seeds;
	const double permuted_mean = permuted_sum / seeds;
	std::printf("  holdout R2: smooth field mean %.3f (min %.3f, limit %.1f), permuted mean %.3f (limit %.1f)\n",
	            smooth_mean, smooth_min, kSmoothR2, permuted_mean, kPermutedR2);
	return smooth_min >= kSmoothR2 && permuted_mean <= kPermutedR2;
}

}  // namespace

int main(int argc, char** argv) {
	const std::vector<std::pair<const char*, std::function<bool()>>> criteria{
	    {"cascade exponent oracle", c1_cascade},
	    {"null calibration", c2_null},
	    {"persistence detection", c3_persistence},
	    {"multifractality separation", c4_separation},
	    {"STL identity", c5_stl},
	    {"distribution ranking", c6_ranking},
	    {"ELM exactness", c7_elm},
	    {"determinism", c8_determinism},
	    {"structure vs noise mapping", c9_mapping},
	};
	std::set<int> only;
	for (int i = 1; i < argc; ++i) {
		only.insert(std::atoi(argv[i]));
	}
	int failures = 0;
	for (std::size_t i = 0; i < criteria.size(); ++i) {
		const int id = static_cast<int>(i) + 1;
		if (!only.empty() && !only.count(id)) {
			continue;
		}
		const auto t0 = Clock::now();
		bool ok = false;
		try {
			ok = criteria[i].second();
		} catch (const std::exception& e) {
			std::printf("  error: %s\n", e.what());
		}
		std::printf("%s criterion %d: %s (%.1f s)\n", ok ? "PASS" : "FAIL", id, criteria[i].first, seconds_since(t0));
		std::fflush(stdout);
		failures += ok ? 0 : 1;
	}
	return failures == 0 ? 0 : 1;
}
