#pragma once

#include "mfwind/pipeline/config.hpp"
#include "mfwind/surrogate/surrogate.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mfwind::pipeline {

enum ExitCode : int { kExitOk = 0, kExitConfigError = 1, kExitAllStationsFailed = 2 };

/// Reads one station file: raw 10-minute records (header names the timestamp
/// column) are aggregated to daily means, value-only files are taken as daily
/// series. Gap entries are appended to `gaps` when given.
core::TimeSeries load_station(const std::filesystem::path& file, const IngestConfig& ingest,
                              std::vector<core::GapEntry>* gaps = nullptr);

/// Smallest shift making every value strictly positive (0 when already so).
double positive_shift(std::span<const double> values);

struct SummaryRow {
	std::string station_id;
	mfdfa::MultifractalSummary original;
	surrogate::SignificanceReport significance;
	std::string best_family;
};

/// station_id,H,H_stderr,W,A,surrogate means/stds,z-scores,best_family
std::string summary_csv(const std::vector<SummaryRow>& rows);

struct HistogramSpec {
	std::string parameter;
	double lo = 0.0;
	double hi = 0.0;
	double step = 0.0;

	std::size_t bins() const;
	/// Values outside [lo, hi] fall into the first or last bin.
	std::size_t bin_of(double value) const;
};

/// H: [0.4, 1.0] step 0.025; W: [0, 1.3] step 0.05; A: [0, 5] step 0.2.
const std::vector<HistogramSpec>& histogram_specs();

struct Histogram {
	HistogramSpec spec;
	std::vector<std::size_t> original;
	std::vector<std::size_t> surrogate_mean;
};

std::vector<Histogram> compute_histograms(const std::vector<SummaryRow>& rows);

/// parameter,bin_lo,bin_hi,original,surrogate_mean
std::string emit_histograms(const std::vector<SummaryRow>& rows);

/// One mapped quantity with a value per station (same order as the ids).
struct MapField {
	std::string name;
	std::vector<double> values;
};

/// H/W/A of the original series and of the surrogate means.
std::vector<MapField> summary_fields(const std::vector<SummaryRow>& rows);

/// Trains one ELM per field on the catalog coordinates and writes
/// maps/<name>.asc plus the maps/maps.json sidecar under output_dir. Stations
/// missing from the catalog are dropped; with fewer than cfg.min_stations left
/// (or no catalog) nothing is written and a "skipped" status is returned.
nlohmann::ordered_json write_maps(const MapConfig& cfg, const std::filesystem::path& catalog,
                                  const std::vector<std::string>& station_ids, const std::vector<MapField>& fields,
                                  const std::filesystem::path& output_dir, std::size_t jobs,
                                  std::vector<std::string>& files);

struct StationOutcome {
	std::string station_id;
	std::string source;
	bool ok = false;
	std::string error;
	std::vector<std::string> files;  // relative to the output directory
	std::optional<SummaryRow> row;
};

struct RunResult {
	int exit_code = kExitOk;
	std::vector<StationOutcome> stations;
	nlohmann::ordered_json manifest;
};

/// Full batch run: per station (in parallel up to cfg.jobs) decompose, rank
/// distributions, analyse the remainder and its shuffled surrogates; then write
/// the summary table, histograms, ELM maps and a manifest with SHA-256 hashes
/// of every output. Throws ConfigError when the config does not validate.
RunResult run_pipeline(const PipelineConfig& cfg);

}  // namespace mfwind::pipeline
