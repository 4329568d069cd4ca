#include "mfwind/core/random.hpp"

#include <cmath>
#include <limits>

namespace mfwind::core {

double Rng::uniform() {
	return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform_open() {
	return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t Rng::below(std::uint64_t bound) {
	// Reject the top partial block so every residue is equally likely.
	const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
	                            std::numeric_limits<std::uint64_t>::max() % bound;
	std::uint64_t draw = engine_();
	while (draw >= limit) {
		draw = engine_();
	}
	return draw % bound;
}

double Rng::normal() {
	if (has_spare_) {
		has_spare_ = false;
		return spare_;
	}
	double u = 0.0;
	double v = 0.0;
	double s = 0.0;
	do {
		u = 2.0 * uniform() - 1.0;
		v = 2.0 * uniform() - 1.0;
		s = u * u + v * v;
	} while (s >= 1.0 || s == 0.0);
	const double factor = std::sqrt(-2.0 * std::log(s) / s);
	spare_ = v * factor;
	has_spare_ = true;
	return u * factor;
}

}  // namespace mfwind::core
