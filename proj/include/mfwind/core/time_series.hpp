#pragma once

#include "mfwind/core/calendar.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mfwind::core {

/// Uniformly sampled scalar series for one station.
struct TimeSeries {
	std::string station_id;
	Date start_date{};
	int step = 1;  // days
	std::vector<double> values;

	std::size_t size() const { return values.size(); }

	/// Throws std::invalid_argument if step <= 0 or any value is not finite.
	void validate() const;
};

struct RawRecord {
	MinuteStamp timestamp = 0;
	double value = 0.0;
	bool missing = false;
};

/// 10-minute records of one station, timestamps strictly increasing.
struct RawRecordBatch {
	std::string station_id;
	std::vector<RawRecord> rows;
};

struct StationMeta {
	std::string station_id;
	double x = 0.0;  // easting, m
	double y = 0.0;  // northing, m
	double altitude = 0.0;
};

/// Column mapping for raw station CSV files.
struct CsvSchema {
	std::string timestamp_column = "time";
	std::string value_column = "value";
	/// When non-empty and present in the header, the station id is read from
	/// this column; otherwise the file stem is used.
	std::string station_column;
	char delimiter = ',';
	/// Cell contents (besides the empty string) that mark a missing value.
	std::vector<std::string> missing_tokens{"-", "NA", "NaN", "-9999"};
};

/// Parse or contract failure while reading a CSV file. `line` is 1-based, 0
/// when the problem is not tied to a line.
class CsvError : public std::runtime_error {
public:
	CsvError(const std::string& message, std::size_t line)
	    : std::runtime_error(line ? message + " (line " + std::to_string(line) + ")" : message),
	      line_(line) {}

	std::size_t line() const { return line_; }

private:
	std::size_t line_;
};

RawRecordBatch load_station_csv(const std::filesystem::path& path, const CsvSchema& schema = {});
RawRecordBatch parse_station_csv(std::istream& in, const std::string& station_id,
                                 const CsvSchema& schema = {});

/// Reads an already-daily series: a header row with `value_column` and one value
/// per row. Station id is the file stem.
TimeSeries load_series_csv(const std::filesystem::path& path, const std::string& value_column = "value",
                           Date start = make_date(2012, 1, 1));

/// True when the header of `path` names `column` (used to tell raw files from
/// daily series files).
bool csv_has_column(const std::filesystem::path& path, const std::string& column, char delimiter = ',');

struct GapEntry {
	std::string station_id;
	Date date{};
	std::string action;
};

struct DailyAggregation {
	TimeSeries series;
	std::vector<GapEntry> gaps;
};

/// Raised when too many days fall below the coverage threshold.
class CoverageError : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

inline constexpr double kDefaultMinCoverage = 0.8;
inline constexpr double kMaxGapFraction = 0.10;

/// Daily means of non-missing samples. Days whose coverage (valid samples /
/// samples_per_day) is below min_coverage are linearly interpolated from the
/// nearest valid days and listed in the gap report.
DailyAggregation aggregate_daily_mean(const RawRecordBatch& batch, double min_coverage = kDefaultMinCoverage,
                                      int samples_per_day = 144);

/// One JSON object per line: {"station_id", "date", "action"}.
void write_gap_report(std::ostream& out, const std::vector<GapEntry>& gaps);

/// Catalog CSV with columns station_id,x,y[,altitude].
std::vector<StationMeta> load_station_catalog(const std::filesystem::path& path);

}  // namespace mfwind::core
