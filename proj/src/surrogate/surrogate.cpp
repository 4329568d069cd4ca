#include "mfwind/surrogate/surrogate.hpp"

#include "mfwind/core/parallel.hpp"
#include "mfwind/core/random.hpp"

#include <algorithm>
#include <cmath>

namespace mfwind::surrogate {

std::vector<double> shuffle(std::span<const double> x, std::uint64_t seed) {
	std::vector<double> out(x.begin(), x.end());
	core::Rng rng(seed);
	for (std::size_t i = out.size(); i > 1; --i) {
		const auto j = static_cast<std::size_t>(rng.below(i));
		std::swap(out[i - 1], out[j]);
	}
	return out;
}

ParameterStats mean_std(std::span<const double> values) {
	ParameterStats s;
	if (values.empty()) {
		return s;
	}
	double sum = 0.0;
	for (double v : values) {
		sum += v;
	}
	s.mean = sum / static_cast<double>(values.size());
	if (values.size() > 1) {
		double ss = 0.0;
		for (double v : values) {
			ss += (v - s.mean) * (v - s.mean);
		}
		s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
	}
	return s;
}

SurrogateEnsemble surrogate_ensemble(std::span<const double> x, const mfdfa::MfdfaConfig& cfg, std::size_t n,
                                     std::uint64_t base_seed, const mfdfa::MultifractalSummary& original,
                                     std::size_t jobs, const std::string& station_id) {
	if (n < 2) {
		throw std::invalid_argument("a surrogate ensemble needs at least two members");
	}
	std::vector<std::optional<mfdfa::MultifractalSummary>> results(n);
	core::parallel_for(n, jobs, [&](std::size_t i) {
		const auto shuffled = shuffle(x, base_seed + i);
		try {
			results[i] = mfdfa::analyze(shuffled, cfg).summary;
		} catch (const mfdfa::SpectrumFitError&) {
			results[i].reset();
		}
	});

	SurrogateEnsemble ens;
	ens.station_id = station_id;
	ens.n_surrogates = n;
	ens.original = original;
	for (const auto& r : results) {
		if (!r) {
			++ens.n_failed;
			continue;
		}
		ens.H_values.push_back(r->H);
		ens.W_values.push_back(r->W);
		ens.A_values.push_back(r->A);
	}
	if (static_cast<double>(ens.n_failed) > kMaxFailureFraction * static_cast<double>(n)) {
		throw EnsembleError(std::to_string(ens.n_failed) + " of " + std::to_string(n) +
		                    " surrogates failed the spectrum summary (series pathological)");
	}
	ens.H = mean_std(ens.H_values);
	ens.W = mean_std(ens.W_values);
	ens.A = mean_std(ens.A_values);
	return ens;
}

SurrogateEnsemble surrogate_ensemble(std::span<const double> x, const mfdfa::MfdfaConfig& cfg, std::size_t n,
                                     std::uint64_t base_seed, std::size_t jobs, const std::string& station_id) {
	const auto original = mfdfa::analyze(x, cfg).summary;
	return surrogate_ensemble(x, cfg, n, base_seed, original, jobs, station_id);
}

ParameterSignificance significance(double original, std::span<const double> values) {
	ParameterSignificance out;
	out.original = original;
	const auto stats = mean_std(values);
	out.surrogate_mean = stats.mean;
	out.surrogate_std = stats.std;
	if (stats.std > 0.0) {
		out.z = (original - stats.mean) / stats.std;
	}
	if (!values.empty()) {
		double below = 0.0;
		for (double v : values) {
			if (v < original) {
				below += 1.0;
			} else if (v == original) {
				below += 0.5;
			}
		}
		out.percentile = below / static_cast<double>(values.size());
		out.p_two_sided = std::min(1.0, 2.0 * std::min(out.percentile, 1.0 - out.percentile));
	}
	return out;
}

SignificanceReport significance(const SurrogateEnsemble& ensemble) {
	SignificanceReport report;
	report.H = significance(ensemble.original.H, ensemble.H_values);
	report.W = significance(ensemble.original.W, ensemble.W_values);
	report.A = significance(ensemble.original.A, ensemble.A_values);
	return report;
}

}  // namespace mfwind::surrogate
