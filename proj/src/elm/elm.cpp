#include "mfwind/elm/elm.hpp"

#include "mfwind/core/parallel.hpp"
#include "mfwind/core/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mfwind::elm {

namespace {

void require_finite(const Eigen::MatrixXd& m, const char* what) {
	if (!m.allFinite()) {
		throw std::invalid_argument(std::string(what) + " contains non-finite values");
	}
}

double sigmoid(double z) {
	return 1.0 / (1.0 + std::exp(-z));
}

Eigen::MatrixXd rows_of(const Eigen::MatrixXd& m, const std::vector<std::size_t>& idx) {
	Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), m.cols());
	for (std::size_t i = 0; i < idx.size(); ++i) {
		out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(idx[i]));
	}
	return out;
}

Eigen::VectorXd entries_of(const Eigen::VectorXd& v, const std::vector<std::size_t>& idx) {
	Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
	for (std::size_t i = 0; i < idx.size(); ++i) {
		out(static_cast<Eigen::Index>(i)) = v(static_cast<Eigen::Index>(idx[i]));
	}
	return out;
}

Eigen::VectorXd inverted_singular_values(const Eigen::VectorXd& sv, double relative_cutoff) {
	const double largest = sv.size() > 0 ? sv(0) : 0.0;
	Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
	for (Eigen::Index i = 0; i < sv.size(); ++i) {
		if (sv(i) > relative_cutoff * largest) {
			inv(i) = 1.0 / sv(i);
		}
	}
	return inv;
}

}  // namespace

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& m, double relative_cutoff) {
	const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
	const Eigen::VectorXd inv = inverted_singular_values(svd.singularValues(), relative_cutoff);
	return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Eigen::MatrixXd hidden_layer(const ElmModel& model, const Eigen::MatrixXd& x) {
	if (static_cast<std::size_t>(x.cols()) != model.input_dim) {
		throw std::invalid_argument("input has " + std::to_string(x.cols()) + " columns, model expects " +
		                            std::to_string(model.input_dim));
	}
	Eigen::MatrixXd scaled(x.rows(), x.cols());
	for (Eigen::Index d = 0; d < x.cols(); ++d) {
		const auto& s = model.input_scaling[static_cast<std::size_t>(d)];
		scaled.col(d) = (x.col(d).array() - s.offset) * s.scale;
	}
	Eigen::MatrixXd h = scaled * model.input_weights.transpose();
	h.rowwise() += model.biases.transpose();
	return h.unaryExpr([](double z) { return sigmoid(z); });
}

ElmModel train_elm(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::size_t hidden_count,
                   std::uint64_t seed) {
	if (x.rows() < 2 || x.cols() < 1) {
		throw std::invalid_argument("ELM training needs at least two samples and one input dimension");
	}
	if (y.size() != x.rows()) {
		throw std::invalid_argument("target length does not match the number of samples");
	}
	if (hidden_count < 1) {
		throw std::invalid_argument("ELM needs at least one hidden node");
	}
	require_finite(x, "ELM input");
	require_finite(y, "ELM target");

	ElmModel model;
	model.input_dim = static_cast<std::size_t>(x.cols());
	model.hidden_count = hidden_count;
	model.seed = seed;
	model.input_scaling.resize(model.input_dim);
	for (Eigen::Index d = 0; d < x.cols(); ++d) {
		const double lo = x.col(d).minCoeff();
		const double hi = x.col(d).maxCoeff();
		auto& s = model.input_scaling[static_cast<std::size_t>(d)];
		s.offset = 0.5 * (lo + hi);
		s.scale = hi > lo ? 2.0 / (hi - lo) : 1.0;
	}
	core::Rng rng(seed);
	const auto n_hidden = static_cast<Eigen::Index>(hidden_count);
	model.input_weights.resize(n_hidden, x.cols());
	model.biases.resize(n_hidden);
	for (Eigen::Index j = 0; j < n_hidden; ++j) {
		for (Eigen::Index d = 0; d < x.cols(); ++d) {
			model.input_weights(j, d) = rng.uniform(-1.0, 1.0);
		}
		model.biases(j) = rng.uniform(0.0, 1.0);
	}
	const Eigen::MatrixXd h = hidden_layer(model, x);
	const Eigen::JacobiSVD<Eigen::MatrixXd> svd(h, Eigen::ComputeThinU | Eigen::ComputeThinV);
	const Eigen::VectorXd inv = inverted_singular_values(svd.singularValues(), kPinvCutoff);
	const auto apply = [&](const Eigen::VectorXd& r) -> Eigen::VectorXd {
		return svd.matrixV() * (inv.asDiagonal() * (svd.matrixU().transpose() * r));
	};
	model.output_weights = apply(y);
	// one refinement step; beta gets large when H is nearly rank deficient
	model.output_weights += apply(y - h * model.output_weights);
	return model;
}

Eigen::VectorXd predict(const ElmModel& model, const Eigen::MatrixXd& x) {
	require_finite(x, "ELM input");
	return hidden_layer(model, x) * model.output_weights;
}

NodeSelection select_hidden_nodes(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                  const std::vector<std::size_t>& candidates, double holdout_fraction,
                                  std::uint64_t seed) {
	if (candidates.empty()) {
		throw std::invalid_argument("no hidden-node candidates given");
	}
	if (!(holdout_fraction > 0.0 && holdout_fraction <= 0.5)) {
		throw std::invalid_argument("holdout fraction must lie in (0, 0.5]");
	}
	const auto n = static_cast<std::size_t>(x.rows());
	if (n < 3 || static_cast<std::size_t>(y.size()) != n) {
		throw std::invalid_argument("node selection needs at least three samples with matching targets");
	}
	std::vector<std::size_t> order(n);
	std::iota(order.begin(), order.end(), 0);
	core::Rng rng(seed);
	for (std::size_t i = n; i > 1; --i) {
		std::swap(order[i - 1], order[static_cast<std::size_t>(rng.below(i))]);
	}
	const auto n_test = std::clamp<std::size_t>(
	    static_cast<std::size_t>(std::llround(holdout_fraction * static_cast<double>(n))), 1, n - 2);

	NodeSelection sel;
	sel.test_indices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
	sel.train_indices.assign(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
	std::sort(sel.test_indices.begin(), sel.test_indices.end());
	std::sort(sel.train_indices.begin(), sel.train_indices.end());
	const auto x_train = rows_of(x, sel.train_indices);
	const auto y_train = entries_of(y, sel.train_indices);
	const auto x_test = rows_of(x, sel.test_indices);
	const auto y_test = entries_of(y, sel.test_indices);

	auto sorted = candidates;
	std::sort(sorted.begin(), sorted.end());
	sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
	std::optional<double> best;
	for (std::size_t k : sorted) {
		CandidateScore score;
		score.hidden_count = k;
		if (k == 0 || k >= sel.train_indices.size()) {
			score.note = "skipped: not smaller than the training set (" + std::to_string(sel.train_indices.size()) + ")";
			sel.candidates.push_back(score);
			continue;
		}
		const auto model = train_elm(x_train, y_train, k, seed);
		const Eigen::VectorXd resid = predict(model, x_test) - y_test;
		const double rmse = std::sqrt(resid.squaredNorm() / static_cast<double>(resid.size()));
		score.test_rmse = rmse;
		sel.candidates.push_back(score);
		if (!best || rmse < *best - 1e-12) {
			best = rmse;
			sel.best_hidden_count = k;
			const double sst = (y_test.array() - y_test.mean()).square().sum();
			sel.best_test_r2 = sst > 0.0 ? 1.0 - resid.squaredNorm() / sst : 0.0;
		}
	}
	if (!best) {
		throw std::invalid_argument("every hidden-node candidate is too large for " +
		                            std::to_string(sel.train_indices.size()) + " training samples");
	}
	sel.best_test_rmse = *best;
	return sel;
}

GridMap predict_grid(const ElmModel& model, const BoundingBox& bbox, double resolution, std::size_t jobs) {
	if (!(resolution > 0.0)) {
		throw std::invalid_argument("grid resolution must be positive");
	}
	if (!(bbox.x_max > bbox.x_min && bbox.y_max > bbox.y_min)) {
		throw std::invalid_argument("degenerate bounding box");
	}
	if (model.input_dim != 2) {
		throw std::invalid_argument("grid prediction needs a model with two inputs (x, y)");
	}
	GridMap grid;
	grid.x_min = bbox.x_min;
	grid.y_min = bbox.y_min;
	grid.resolution = resolution;
	const double cols = std::ceil((bbox.x_max - bbox.x_min) / resolution);
	const double rows = std::ceil((bbox.y_max - bbox.y_min) / resolution);
	if (cols * rows > static_cast<double>(kMaxGridCells)) {
		throw std::invalid_argument("grid of " + std::to_string(cols * rows) + " cells exceeds the 1e8 cell limit");
	}
	grid.n_cols = static_cast<std::size_t>(cols);
	grid.n_rows = static_cast<std::size_t>(rows);
	grid.values.resize(grid.n_cols * grid.n_rows);
	core::parallel_for(grid.n_rows, jobs, [&](std::size_t r) {
		Eigen::MatrixXd points(static_cast<Eigen::Index>(grid.n_cols), 2);
		for (std::size_t c = 0; c < grid.n_cols; ++c) {
			points(static_cast<Eigen::Index>(c), 0) = grid.centre_x(c);
			points(static_cast<Eigen::Index>(c), 1) = grid.centre_y(r);
		}
		const Eigen::VectorXd v = predict(model, points);
		std::copy(v.data(), v.data() + v.size(), grid.values.begin() + static_cast<std::ptrdiff_t>(r * grid.n_cols));
	});
	return grid;
}

}  // namespace mfwind::elm
