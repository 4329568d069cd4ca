#pragma once

#include "mfwind/core/time_series.hpp"
#include "mfwind/distfit/fit.hpp"
#include "mfwind/elm/elm.hpp"
#include "mfwind/mfdfa/mfdfa.hpp"
#include "mfwind/stl/stl.hpp"
#include "mfwind/surrogate/surrogate.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mfwind::pipeline {

/// Shortest decimal representation that round-trips; "nan"/"inf" spelled out.
std::string format_double(double value);

/// Writes `content` to `path`, creating parent directories.
void write_file(const std::filesystem::path& path, const std::string& content);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

/// date,trend,seasonal,remainder
std::string stl_csv(const core::TimeSeries& ts, const stl::StlDecomposition& d);

/// Single "value" column, readable by core::load_series_csv.
std::string series_csv(std::span<const double> values);

nlohmann::ordered_json fit_json(const std::string& station_id, const std::vector<distfit::RankedFamily>& ranked,
                                double shift);

/// Full MFDFA record. `summary_error` is reported instead of a summary when set.
nlohmann::ordered_json mfdfa_json(const std::string& station_id, const mfdfa::MfdfaConfig& cfg,
                                  const mfdfa::MfdfaCore& core, const std::optional<mfdfa::MultifractalSummary>& summary,
                                  const std::string& summary_error = {});

nlohmann::ordered_json summary_json(const mfdfa::MultifractalSummary& s);

nlohmann::ordered_json surrogate_json(const surrogate::SurrogateEnsemble& ens,
                                      const surrogate::SignificanceReport& report);

/// F_q(s) matrix for plotting: one row per scale, one column per q.
std::string fluctuation_csv(const mfdfa::FluctuationSurface& surface);

/// (q, h, stderr, tau) and (q, alpha, f) tables.
std::string hurst_csv(const mfdfa::GeneralizedHurst& gh, const mfdfa::MultifractalSpectrum& spec);
std::string spectrum_csv(const mfdfa::MultifractalSpectrum& spec);

/// ESRI ASCII grid: ncols, nrows, xllcorner, yllcorner, cellsize, NODATA_value,
/// then rows from north to south.
std::string ascii_grid(const elm::GridMap& grid, double nodata = -9999.0);

}  // namespace mfwind::pipeline
