#pragma once

#include <functional>
#include <vector>

namespace mfwind::distfit {

struct NelderMeadOptions {
	int max_iterations = 500;
	double f_tolerance = 1e-11;  // relative spread of simplex values
	double x_tolerance = 1e-7;   // simplex diameter, max-norm relative to 1 + |x|
};

struct NelderMeadResult {
	std::vector<double> x;
	double value = 0.0;
	int iterations = 0;
	bool converged = false;
};

/// Derivative-free simplex minimisation. Non-finite objective values are
/// treated as +inf. The starting point is a simplex vertex, so the returned
/// value never exceeds objective(start).
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                             const std::vector<double>& start, const std::vector<double>& step,
                             const NelderMeadOptions& options = {});

}  // namespace mfwind::distfit
