#pragma once

#include <cstdint>
#include <random>

namespace mfwind::core {

/// Seeded random source used everywhere a result must be reproducible.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The transforms to uniform, bounded-integer and normal variates are
/// implemented here rather than taken from <random> distributions, whose
/// algorithms differ between standard library vendors.
class Rng {
public:
	explicit Rng(std::uint64_t seed) : engine_(seed) {}

	std::uint64_t next_u64() { return engine_(); }

	/// Uniform on [0, 1) with 53 random bits.
	double uniform();

	/// Uniform on (0, 1); never returns 0, safe for logarithms.
	double uniform_open();

	double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

	/// Unbiased integer in [0, bound) by rejection. bound must be > 0.
	std::uint64_t below(std::uint64_t bound);

	/// Standard normal via the Marsaglia polar method.
	double normal();

private:
	std::mt19937_64 engine_;
	bool has_spare_ = false;
	double spare_ = 0.0;
};

}  // namespace mfwind::core
