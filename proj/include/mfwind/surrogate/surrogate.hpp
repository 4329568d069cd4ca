#pragma once

#include "mfwind/mfdfa/mfdfa.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mfwind::surrogate {

/// Fisher-Yates permutation driven by core::Rng(seed).
std::vector<double> shuffle(std::span<const double> x, std::uint64_t seed);

struct ParameterStats {
	double mean = 0.0;
	double std = 0.0;  // sample standard deviation (n - 1)
};

struct SurrogateEnsemble {
	std::string station_id;
	std::size_t n_surrogates = 0;  // requested
	std::size_t n_failed = 0;      // skipped because the spectrum summary failed
	std::vector<double> H_values;
	std::vector<double> W_values;
	std::vector<double> A_values;
	ParameterStats H;
	ParameterStats W;
	ParameterStats A;
	mfdfa::MultifractalSummary original;
};

/// Raised when more than 20% of the surrogates fail their spectrum summary.
class EnsembleError : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

inline constexpr double kMaxFailureFraction = 0.2;

/// Analyses n shuffled copies (surrogate i uses seed base_seed + i). Results
/// are independent of `jobs`.
SurrogateEnsemble surrogate_ensemble(std::span<const double> x, const mfdfa::MfdfaConfig& cfg, std::size_t n,
                                     std::uint64_t base_seed, std::size_t jobs = 1,
                                     const std::string& station_id = {});

/// Same, with the original summary supplied by the caller instead of recomputed.
SurrogateEnsemble surrogate_ensemble(std::span<const double> x, const mfdfa::MfdfaConfig& cfg, std::size_t n,
                                     std::uint64_t base_seed, const mfdfa::MultifractalSummary& original,
                                     std::size_t jobs = 1, const std::string& station_id = {});

struct ParameterSignificance {
	double original = 0.0;
	double surrogate_mean = 0.0;
	double surrogate_std = 0.0;
	std::optional<double> z;   // absent when the surrogate spread is zero
	double percentile = 0.0;   // (count below + half count equal) / n
	double p_two_sided = 0.0;  // 2 min(percentile, 1 - percentile), capped at 1
};

struct SignificanceReport {
	ParameterSignificance H;
	ParameterSignificance W;
	ParameterSignificance A;
};

ParameterSignificance significance(double original, std::span<const double> surrogate_values);
SignificanceReport significance(const SurrogateEnsemble& ensemble);

ParameterStats mean_std(std::span<const double> values);

}  // namespace mfwind::surrogate
