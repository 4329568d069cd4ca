#include "mfwind/pipeline/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

namespace mfwind::pipeline {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
	if (!obj.is_object()) {
		throw ConfigError("'" + where + "' must be an object");
	}
	for (const auto& [key, value] : obj.items()) {
		if (!allowed.count(key)) {
			throw ConfigError("unknown key '" + key + "' in " + where);
		}
	}
}

template <typename T>
void read(const json& obj, const char* key, T& target) {
	if (obj.contains(key)) {
		try {
			target = obj.at(key).get<T>();
		} catch (const json::exception& e) {
			throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
		}
	}
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
	std::filesystem::path path(p);
	return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

void PipelineConfig::validate() const {
	if (jobs < 1) {
		throw ConfigError("jobs must be at least 1");
	}
	if (input_dir.empty() || !std::filesystem::is_directory(input_dir)) {
		throw ConfigError("input directory '" + input_dir.string() + "' does not exist");
	}
	if (input_files().empty()) {
		throw ConfigError("input directory '" + input_dir.string() + "' contains no CSV files");
	}
	if (!catalog.empty() && !std::filesystem::is_regular_file(catalog)) {
		throw ConfigError("station catalog '" + catalog.string() + "' does not exist");
	}
	if (!(ingest.min_coverage > 0.0 && ingest.min_coverage <= 1.0)) {
		throw ConfigError("min_coverage must lie in (0, 1]");
	}
	if (surrogate.n < 2) {
		throw ConfigError("surrogate count must be at least 2");
	}
	if (!(map.holdout_fraction > 0.0 && map.holdout_fraction <= 0.5)) {
		throw ConfigError("holdout_fraction must lie in (0, 0.5]");
	}
	if (!(map.resolution > 0.0) || map.candidates.empty()) {
		throw ConfigError("map resolution must be positive and candidates non-empty");
	}
	try {
		mfdfa.validate();
		if (stl_enabled) {
			(void)stl.resolved();
		}
	} catch (const std::invalid_argument& e) {
		throw ConfigError(e.what());
	}
}

std::vector<std::filesystem::path> PipelineConfig::input_files() const {
	std::vector<std::filesystem::path> files;
	if (!std::filesystem::is_directory(input_dir)) {
		return files;
	}
	for (const auto& entry : std::filesystem::directory_iterator(input_dir)) {
		if (entry.is_regular_file() && entry.path().extension() == ".csv") {
			files.push_back(entry.path());
		}
	}
	std::sort(files.begin(), files.end());
	return files;
}

PipelineConfig config_from_json(const json& j, const std::filesystem::path& base_dir) {
	reject_unknown(j, {"input_dir", "catalog", "output_dir", "jobs", "ingest", "stl", "mfdfa", "surrogate", "map",
	                   "write_matrices"},
	               "config");
	PipelineConfig cfg;
	std::string path;
	if (j.contains("input_dir")) {
		read(j, "input_dir", path);
		cfg.input_dir = resolve(base_dir, path);
	}
	if (j.contains("catalog")) {
		read(j, "catalog", path);
		cfg.catalog = resolve(base_dir, path);
	}
	if (j.contains("output_dir")) {
		read(j, "output_dir", path);
		cfg.output_dir = resolve(base_dir, path);
	}
	read(j, "jobs", cfg.jobs);
	read(j, "write_matrices", cfg.write_matrices);

	if (j.contains("ingest")) {
		const auto& in = j.at("ingest");
		reject_unknown(in, {"timestamp_column", "value_column", "station_column", "delimiter", "missing_tokens",
		                    "min_coverage", "samples_per_day", "series_start"},
		               "ingest");
		read(in, "timestamp_column", cfg.ingest.schema.timestamp_column);
		read(in, "value_column", cfg.ingest.schema.value_column);
		read(in, "station_column", cfg.ingest.schema.station_column);
		read(in, "missing_tokens", cfg.ingest.schema.missing_tokens);
		read(in, "min_coverage", cfg.ingest.min_coverage);
		read(in, "samples_per_day", cfg.ingest.samples_per_day);
		if (in.contains("delimiter")) {
			std::string d;
			read(in, "delimiter", d);
			if (d.size() != 1) {
				throw ConfigError("delimiter must be a single character");
			}
			cfg.ingest.schema.delimiter = d[0];
		}
		if (in.contains("series_start")) {
			std::string d;
			read(in, "series_start", d);
			try {
				cfg.ingest.series_start = core::parse_date(d);
			} catch (const std::invalid_argument& e) {
				throw ConfigError(e.what());
			}
		}
	}
	if (j.contains("stl")) {
		const auto& s = j.at("stl");
		reject_unknown(s, {"enabled", "period", "seasonal_window", "trend_window", "lowpass_window",
		                   "inner_iterations", "outer_iterations", "loess_degree"},
		               "stl");
		read(s, "enabled", cfg.stl_enabled);
		read(s, "period", cfg.stl.period);
		read(s, "seasonal_window", cfg.stl.seasonal_window);
		read(s, "trend_window", cfg.stl.trend_window);
		read(s, "lowpass_window", cfg.stl.lowpass_window);
		read(s, "inner_iterations", cfg.stl.inner_iterations);
		read(s, "outer_iterations", cfg.stl.outer_iterations);
		read(s, "loess_degree", cfg.stl.loess_degree);
	}
	if (j.contains("mfdfa")) {
		const auto& m = j.at("mfdfa");
		reject_unknown(m, {"q_grid", "scale_min", "scale_max", "n_scales", "scales", "detrend_degree"}, "mfdfa");
		read(m, "q_grid", cfg.mfdfa.q_grid);
		read(m, "scale_min", cfg.mfdfa.scale_min);
		read(m, "scale_max", cfg.mfdfa.scale_max);
		read(m, "n_scales", cfg.mfdfa.n_scales);
		read(m, "scales", cfg.mfdfa.explicit_scales);
		read(m, "detrend_degree", cfg.mfdfa.detrend_degree);
	}
	if (j.contains("surrogate")) {
		const auto& s = j.at("surrogate");
		reject_unknown(s, {"n", "base_seed"}, "surrogate");
		read(s, "n", cfg.surrogate.n);
		read(s, "base_seed", cfg.surrogate.base_seed);
	}
	if (j.contains("map")) {
		const auto& m = j.at("map");
		reject_unknown(m, {"candidates", "seed", "holdout_fraction", "resolution", "bbox", "min_stations"}, "map");
		read(m, "candidates", cfg.map.candidates);
		read(m, "seed", cfg.map.seed);
		read(m, "holdout_fraction", cfg.map.holdout_fraction);
		read(m, "resolution", cfg.map.resolution);
		read(m, "min_stations", cfg.map.min_stations);
		if (m.contains("bbox")) {
			std::vector<double> b;
			read(m, "bbox", b);
			if (b.size() != 4) {
				throw ConfigError("bbox must be [x_min, y_min, x_max, y_max]");
			}
			cfg.map.bbox = elm::BoundingBox{b[0], b[1], b[2], b[3]};
		}
	}
	return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
	std::ifstream in(path);
	if (!in) {
		throw ConfigError("cannot open config '" + path.string() + "'");
	}
	json j;
	try {
		j = json::parse(in);
	} catch (const json::parse_error& e) {
		throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
	}
	return config_from_json(j, path.parent_path());
}

nlohmann::ordered_json analysis_settings_json(const PipelineConfig& cfg) {
	nlohmann::ordered_json j;
	j["ingest"] = {{"min_coverage", cfg.ingest.min_coverage}, {"samples_per_day", cfg.ingest.samples_per_day}};
	if (cfg.stl_enabled) {
		const auto s = cfg.stl.resolved();
		j["stl"] = {{"period", s.period},
		            {"seasonal_window", s.seasonal_window},
		            {"trend_window", s.trend_window},
		            {"lowpass_window", s.lowpass_window},
		            {"inner_iterations", s.inner_iterations},
		            {"outer_iterations", s.outer_iterations},
		            {"loess_degree", s.loess_degree}};
	} else {
		j["stl"] = nullptr;
	}
	j["mfdfa"] = {{"q_grid", cfg.mfdfa.q_grid},
	              {"scales", cfg.mfdfa.scales()},
	              {"detrend_degree", cfg.mfdfa.detrend_degree}};
	j["surrogate"] = {{"n", cfg.surrogate.n}, {"base_seed", cfg.surrogate.base_seed}};
	j["map"] = {{"candidates", cfg.map.candidates},
	            {"seed", cfg.map.seed},
	            {"holdout_fraction", cfg.map.holdout_fraction},
	            {"resolution", cfg.map.resolution}};
	return j;
}

}  // namespace mfwind::pipeline
