#include "mfwind/core/time_series.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>

namespace mfwind::core {

namespace {

std::string trim(std::string_view text) {
	std::size_t b = 0;
	std::size_t e = text.size();
	while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) {
		++b;
	}
	while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) {
		--e;
	}
	text = text.substr(b, e - b);
	if (text.size() >= 2 && text.front() == '"' && text.back() == '"') {
		text = text.substr(1, text.size() - 2);
	}
	return std::string(text);
}

std::vector<std::string> split(const std::string& line, char delimiter) {
	std::vector<std::string> cells;
	std::size_t start = 0;
	for (;;) {
		const auto pos = line.find(delimiter, start);
		cells.push_back(trim(std::string_view(line).substr(start, pos - start)));
		if (pos == std::string::npos) {
			break;
		}
		start = pos + 1;
	}
	return cells;
}

std::optional<double> parse_double(const std::string& cell) {
	double value = 0.0;
	const char* first = cell.data();
	const char* last = first + cell.size();
	if (first != last && *first == '+') {
		++first;
	}
	auto [ptr, ec] = std::from_chars(first, last, value);
	if (ec != std::errc{} || ptr != last) {
		return std::nullopt;
	}
	return value;
}

std::size_t column_index(const std::vector<std::string>& header, const std::string& name) {
	const auto it = std::find(header.begin(), header.end(), name);
	return it == header.end() ? std::string::npos : static_cast<std::size_t>(it - header.begin());
}

bool read_line(std::istream& in, std::string& line) {
	if (!std::getline(in, line)) {
		return false;
	}
	if (!line.empty() && line.back() == '\r') {
		line.pop_back();
	}
	return true;
}

std::vector<std::string> read_header(std::istream& in, char delimiter) {
	std::string line;
	if (!read_line(in, line)) {
		throw CsvError("missing header row", 1);
	}
	if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) {
		line.erase(0, 3);  // UTF-8 BOM
	}
	return split(line, delimiter);
}

}  // namespace

void TimeSeries::validate() const {
	if (step <= 0) {
		throw std::invalid_argument("time series step must be positive");
	}
	for (std::size_t i = 0; i < values.size(); ++i) {
		if (!std::isfinite(values[i])) {
			throw std::invalid_argument("non-finite value at index " + std::to_string(i) + " in series '" +
			                            station_id + "'");
		}
	}
}

RawRecordBatch parse_station_csv(std::istream& in, const std::string& station_id, const CsvSchema& schema) {
	const auto header = read_header(in, schema.delimiter);
	const auto ts_col = column_index(header, schema.timestamp_column);
	const auto value_col = column_index(header, schema.value_column);
	if (ts_col == std::string::npos) {
		throw CsvError("header lacks timestamp column '" + schema.timestamp_column + "'", 1);
	}
	if (value_col == std::string::npos) {
		throw CsvError("header lacks value column '" + schema.value_column + "'", 1);
	}
	const auto station_col =
	    schema.station_column.empty() ? std::string::npos : column_index(header, schema.station_column);

	RawRecordBatch batch;
	batch.station_id = station_id;
	std::string line;
	std::size_t line_no = 1;
	while (read_line(in, line)) {
		++line_no;
		if (trim(line).empty()) {
			continue;
		}
		const auto cells = split(line, schema.delimiter);
		if (cells.size() <= std::max(ts_col, value_col) ||
		    (station_col != std::string::npos && cells.size() <= station_col)) {
			throw CsvError("too few columns", line_no);
		}
		RawRecord record;
		try {
			record.timestamp = parse_timestamp(cells[ts_col]);
		} catch (const std::invalid_argument& e) {
			throw CsvError(e.what(), line_no);
		}
		const auto& cell = cells[value_col];
		const bool sentinel =
		    cell.empty() ||
		    std::find(schema.missing_tokens.begin(), schema.missing_tokens.end(), cell) != schema.missing_tokens.end();
		if (sentinel) {
			record.missing = true;
		} else if (auto v = parse_double(cell); v && std::isfinite(*v)) {
			record.value = *v;
		} else {
			throw CsvError("unparseable value '" + cell + "'", line_no);
		}
		if (!batch.rows.empty() && record.timestamp <= batch.rows.back().timestamp) {
			throw CsvError("timestamps not strictly increasing", line_no);
		}
		if (station_col != std::string::npos && batch.station_id.empty()) {
			batch.station_id = cells[station_col];
		}
		batch.rows.push_back(record);
	}
	return batch;
}

RawRecordBatch load_station_csv(const std::filesystem::path& path, const CsvSchema& schema) {
	std::ifstream in(path);
	if (!in) {
		throw CsvError("cannot open '" + path.string() + "'", 0);
	}
	return parse_station_csv(in, schema.station_column.empty() ? path.stem().string() : std::string{}, schema);
}

TimeSeries load_series_csv(const std::filesystem::path& path, const std::string& value_column, Date start) {
	std::ifstream in(path);
	if (!in) {
		throw CsvError("cannot open '" + path.string() + "'", 0);
	}
	const auto header = read_header(in, ',');
	const auto col = column_index(header, value_column);
	if (col == std::string::npos) {
		throw CsvError("header lacks value column '" + value_column + "'", 1);
	}
	TimeSeries ts;
	ts.station_id = path.stem().string();
	ts.start_date = start;
	std::string line;
	std::size_t line_no = 1;
	while (read_line(in, line)) {
		++line_no;
		if (trim(line).empty()) {
			continue;
		}
		const auto cells = split(line, ',');
		if (cells.size() <= col) {
			throw CsvError("too few columns", line_no);
		}
		const auto v = parse_double(cells[col]);
		if (!v || !std::isfinite(*v)) {
			throw CsvError("unparseable value '" + cells[col] + "'", line_no);
		}
		ts.values.push_back(*v);
	}
	return ts;
}

bool csv_has_column(const std::filesystem::path& path, const std::string& column, char delimiter) {
	std::ifstream in(path);
	if (!in) {
		return false;
	}
	const auto header = read_header(in, delimiter);
	return column_index(header, column) != std::string::npos;
}

DailyAggregation aggregate_daily_mean(const RawRecordBatch& batch, double min_coverage, int samples_per_day) {
	if (batch.rows.empty()) {
		throw std::invalid_argument("empty record batch for station '" + batch.station_id + "'");
	}
	if (!(min_coverage > 0.0 && min_coverage <= 1.0)) {
		throw std::invalid_argument("min_coverage must lie in (0, 1]");
	}
	const Date first = day_of(batch.rows.front().timestamp);
	const Date last = day_of(batch.rows.back().timestamp);
	const auto n_days = static_cast<std::size_t>((last - first).count()) + 1;

	std::vector<double> sums(n_days, 0.0);
	std::vector<int> counts(n_days, 0);
	for (const auto& row : batch.rows) {
		if (row.missing) {
			continue;
		}
		const auto d = static_cast<std::size_t>((day_of(row.timestamp) - first).count());
		sums[d] += row.value;
		++counts[d];
	}

	DailyAggregation out;
	out.series.station_id = batch.station_id;
	out.series.start_date = first;
	out.series.step = 1;
	out.series.values.assign(n_days, 0.0);
	std::vector<bool> valid(n_days, false);
	for (std::size_t d = 0; d < n_days; ++d) {
		if (counts[d] > 0 && static_cast<double>(counts[d]) >= min_coverage * samples_per_day) {
			valid[d] = true;
			out.series.values[d] = sums[d] / counts[d];
		}
	}
	const auto n_bad = static_cast<std::size_t>(std::count(valid.begin(), valid.end(), false));
	if (static_cast<double>(n_bad) > kMaxGapFraction * static_cast<double>(n_days)) {
		throw CoverageError("station '" + batch.station_id + "': " + std::to_string(n_bad) + " of " +
		                    std::to_string(n_days) + " days below coverage; series unfit for analysis");
	}
	if (n_bad == n_days) {
		throw CoverageError("station '" + batch.station_id + "' has no day with sufficient coverage");
	}

	// Linear interpolation between the nearest valid days; constant at the ends.
	std::size_t prev = n_days;
	for (std::size_t d = 0; d < n_days; ++d) {
		if (valid[d]) {
			prev = d;
			continue;
		}
		std::size_t next = d + 1;
		while (next < n_days && !valid[next]) {
			++next;
		}
		double value = 0.0;
		if (prev == n_days) {
			value = out.series.values[next];
		} else if (next == n_days) {
			value = out.series.values[prev];
		} else {
			const double t = static_cast<double>(d - prev) / static_cast<double>(next - prev);
			value = (1.0 - t) * out.series.values[prev] + t * out.series.values[next];
		}
		out.series.values[d] = value;
		out.gaps.push_back({batch.station_id, first + std::chrono::days{static_cast<long>(d)}, "interpolated"});
	}
	return out;
}

void write_gap_report(std::ostream& out, const std::vector<GapEntry>& gaps) {
	for (const auto& gap : gaps) {
		nlohmann::ordered_json j;
		j["station_id"] = gap.station_id;
		j["date"] = format_date(gap.date);
		j["action"] = gap.action;
		out << j.dump() << '\n';
	}
}

std::vector<StationMeta> load_station_catalog(const std::filesystem::path& path) {
	std::ifstream in(path);
	if (!in) {
		throw CsvError("cannot open station catalog '" + path.string() + "'", 0);
	}
	const auto header = read_header(in, ',');
	const auto id_col = column_index(header, "station_id");
	const auto x_col = column_index(header, "x");
	const auto y_col = column_index(header, "y");
	const auto alt_col = column_index(header, "altitude");
	if (id_col == std::string::npos || x_col == std::string::npos || y_col == std::string::npos) {
		throw CsvError("station catalog needs columns station_id, x, y", 1);
	}
	std::vector<StationMeta> stations;
	std::set<std::string> seen;
	std::string line;
	std::size_t line_no = 1;
	while (read_line(in, line)) {
		++line_no;
		if (trim(line).empty()) {
			continue;
		}
		const auto cells = split(line, ',');
		if (cells.size() <= std::max({id_col, x_col, y_col})) {
			throw CsvError("too few columns", line_no);
		}
		StationMeta meta;
		meta.station_id = cells[id_col];
		const auto x = parse_double(cells[x_col]);
		const auto y = parse_double(cells[y_col]);
		if (!x || !y || !std::isfinite(*x) || !std::isfinite(*y)) {
			throw CsvError("non-finite station coordinates", line_no);
		}
		meta.x = *x;
		meta.y = *y;
		if (alt_col != std::string::npos && alt_col < cells.size() && !cells[alt_col].empty()) {
			const auto alt = parse_double(cells[alt_col]);
			if (!alt) {
				throw CsvError("unparseable altitude", line_no);
			}
			meta.altitude = *alt;
		}
		if (!seen.insert(meta.station_id).second) {
			throw CsvError("duplicate station id '" + meta.station_id + "'", line_no);
		}
		stations.push_back(meta);
	}
	return stations;
}

}  // namespace mfwind::core
