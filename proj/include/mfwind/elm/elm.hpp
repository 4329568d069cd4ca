#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mfwind::elm {

/// Affine map of one input dimension onto [-1, 1]: u = (x - offset) * scale.
struct InputScaling {
	double offset = 0.0;
	double scale = 1.0;
};

/// Single-hidden-layer network with random fixed input weights and biases and
/// least-squares output weights. Activation is the logistic sigmoid.
struct ElmModel {
	std::size_t input_dim = 0;
	std::size_t hidden_count = 0;
	Eigen::MatrixXd input_weights;  // hidden_count x input_dim, uniform on [-1, 1]
	Eigen::VectorXd biases;         // hidden_count, uniform on [0, 1]
	Eigen::VectorXd output_weights; // hidden_count
	std::string activation = "sigmoid";
	std::vector<InputScaling> input_scaling;
	std::uint64_t seed = 0;
};

inline constexpr double kPinvCutoff = 1e-10;

/// Moore-Penrose pseudoinverse by SVD; singular values below
/// relative_cutoff * max singular value are treated as zero.
Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& m, double relative_cutoff = kPinvCutoff);

/// Hidden-layer output matrix (rows: samples, columns: hidden nodes) for raw
/// inputs, using the model's stored input scaling.
Eigen::MatrixXd hidden_layer(const ElmModel& model, const Eigen::MatrixXd& x);

/// Node j draws its input_dim weights and then its bias from core::Rng(seed),
/// so models sharing a seed are nested: the first k nodes coincide.
/// Throws std::invalid_argument on non-finite inputs or bad shapes.
ElmModel train_elm(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::size_t hidden_count,
                   std::uint64_t seed);

Eigen::VectorXd predict(const ElmModel& model, const Eigen::MatrixXd& x);

struct CandidateScore {
	std::size_t hidden_count = 0;
	std::optional<double> test_rmse;  // absent when skipped
	std::string note;
};

struct NodeSelection {
	std::size_t best_hidden_count = 0;
	double best_test_rmse = 0.0;
	double best_test_r2 = 0.0;
	std::vector<CandidateScore> candidates;
	std::vector<std::size_t> train_indices;
	std::vector<std::size_t> test_indices;
};

inline const std::vector<std::size_t> kDefaultCandidates{5, 10, 20, 40, 80, 160};

/// Seeded random holdout split; trains every candidate size on the training
/// part and keeps the one with the lowest test RMSE (ties within 1e-12 go to
/// the smaller network). Candidates >= training-set size are skipped.
NodeSelection select_hidden_nodes(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                  const std::vector<std::size_t>& candidates, double holdout_fraction,
                                  std::uint64_t seed);

struct BoundingBox {
	double x_min = 0.0;
	double y_min = 0.0;
	double x_max = 0.0;
	double y_max = 0.0;
};

/// Raster of predictions at cell centres. Row 0 is the southernmost row
/// (y_min); values are row-major.
struct GridMap {
	double x_min = 0.0;
	double y_min = 0.0;
	double resolution = 250.0;
	std::size_t n_cols = 0;
	std::size_t n_rows = 0;
	std::vector<double> values;

	double at(std::size_t row, std::size_t col) const { return values[row * n_cols + col]; }
	double centre_x(std::size_t col) const { return x_min + (static_cast<double>(col) + 0.5) * resolution; }
	double centre_y(std::size_t row) const { return y_min + (static_cast<double>(row) + 0.5) * resolution; }
};

inline constexpr std::size_t kMaxGridCells = 100'000'000;

/// n_cols = ceil(width / resolution), n_rows = ceil(height / resolution).
GridMap predict_grid(const ElmModel& model, const BoundingBox& bbox, double resolution = 250.0,
                     std::size_t jobs = 1);

}  // namespace mfwind::elm
