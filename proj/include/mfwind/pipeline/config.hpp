#pragma once

#include "mfwind/core/time_series.hpp"
#include "mfwind/elm/elm.hpp"
#include "mfwind/mfdfa/mfdfa.hpp"
#include "mfwind/stl/stl.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mfwind::pipeline {

class ConfigError : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

struct IngestConfig {
	core::CsvSchema schema;
	double min_coverage = core::kDefaultMinCoverage;
	int samples_per_day = 144;
	/// Start date assigned to value-only (already daily) series files.
	core::Date series_start = core::make_date(2012, 1, 1);
};

struct SurrogateConfig {
	std::size_t n = 1000;
	std::uint64_t base_seed = 1;
};

struct MapConfig {
	std::vector<std::size_t> candidates = elm::kDefaultCandidates;
	std::uint64_t seed = 1;
	double holdout_fraction = 0.2;
	double resolution = 250.0;
	std::optional<elm::BoundingBox> bbox;  // default: station extent padded by 5%
	std::size_t min_stations = 10;
};

struct PipelineConfig {
	std::filesystem::path input_dir;
	std::filesystem::path catalog;  // optional; mapping is skipped without it
	std::filesystem::path output_dir = "mfwind_out";
	IngestConfig ingest;
	bool stl_enabled = true;
	stl::StlConfig stl;
	mfdfa::MfdfaConfig mfdfa;
	SurrogateConfig surrogate;
	MapConfig map;
	bool write_matrices = false;
	std::size_t jobs = 1;

	/// Throws ConfigError when a referenced path is missing, the input
	/// directory holds no CSV file, or a parameter is out of range.
	void validate() const;

	/// Sorted list of *.csv files in input_dir.
	std::vector<std::filesystem::path> input_files() const;
};

/// Builds a config from JSON. Relative paths are resolved against base_dir.
/// Unknown keys are rejected so typos do not silently fall back to defaults.
PipelineConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);

/// Effective settings echoed into outputs (paths and jobs excluded, so echoes
/// do not depend on where or how wide the run was).
nlohmann::ordered_json analysis_settings_json(const PipelineConfig& cfg);

}  // namespace mfwind::pipeline
