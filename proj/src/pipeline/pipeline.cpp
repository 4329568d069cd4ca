#include "mfwind/pipeline/pipeline.hpp"

#include "mfwind/core/parallel.hpp"
#include "mfwind/distfit/fit.hpp"
#include "mfwind/elm/elm.hpp"
#include "mfwind/pipeline/io.hpp"
#include "mfwind/stl/stl.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace mfwind::pipeline {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

core::TimeSeries load_station(const fs::path& file, const IngestConfig& ingest, std::vector<core::GapEntry>* gaps) {
	if (core::csv_has_column(file, ingest.schema.timestamp_column, ingest.schema.delimiter)) {
		const auto batch = core::load_station_csv(file, ingest.schema);
		auto daily = core::aggregate_daily_mean(batch, ingest.min_coverage, ingest.samples_per_day);
		if (gaps) {
			gaps->insert(gaps->end(), daily.gaps.begin(), daily.gaps.end());
		}
		return std::move(daily.series);
	}
	auto ts = core::load_series_csv(file, ingest.schema.value_column, ingest.series_start);
	ts.validate();
	return ts;
}

double positive_shift(std::span<const double> values) {
	if (values.empty()) {
		return 0.0;
	}
	const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
	if (*lo > 0.0) {
		return 0.0;
	}
	const double span = *hi - *lo;
	return -*lo + (span > 0.0 ? 1e-3 * span : 1e-3);
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
	std::string out =
	    "station_id,H,H_stderr,W,A,surrogate_H_mean,surrogate_H_std,surrogate_W_mean,surrogate_W_std,"
	    "surrogate_A_mean,surrogate_A_std,z_H,z_W,z_A,best_family\n";
	auto z = [](const surrogate::ParameterSignificance& s) { return s.z ? format_double(*s.z) : std::string{}; };
	for (const auto& r : rows) {
		const auto& o = r.original;
		const auto& s = r.significance;
		out += r.station_id + ',' + format_double(o.H) + ',' + format_double(o.H_stderr) + ',' + format_double(o.W) +
		       ',' + format_double(o.A) + ',' + format_double(s.H.surrogate_mean) + ',' +
		       format_double(s.H.surrogate_std) + ',' + format_double(s.W.surrogate_mean) + ',' +
		       format_double(s.W.surrogate_std) + ',' + format_double(s.A.surrogate_mean) + ',' +
		       format_double(s.A.surrogate_std) + ',' + z(s.H) + ',' + z(s.W) + ',' + z(s.A) + ',' + r.best_family +
		       '\n';
	}
	return out;
}

std::size_t HistogramSpec::bins() const {
	return static_cast<std::size_t>(std::llround((hi - lo) / step));
}

std::size_t HistogramSpec::bin_of(double value) const {
	const auto n = bins();
	if (!(value > lo)) {
		return 0;
	}
	const auto idx = static_cast<std::size_t>(std::floor((value - lo) / step + 1e-9));
	return std::min(idx, n - 1);
}

const std::vector<HistogramSpec>& histogram_specs() {
	static const std::vector<HistogramSpec> specs{
	    {"H", 0.4, 1.0, 0.025},
	    {"W", 0.0, 1.3, 0.05},
	    {"A", 0.0, 5.0, 0.2},
	};
	return specs;
}

std::vector<Histogram> compute_histograms(const std::vector<SummaryRow>& rows) {
	std::vector<Histogram> out;
	for (const auto& spec : histogram_specs()) {
		Histogram h;
		h.spec = spec;
		h.original.assign(spec.bins(), 0);
		h.surrogate_mean.assign(spec.bins(), 0);
		for (const auto& r : rows) {
			double original = 0.0;
			double sur = 0.0;
			if (spec.parameter == "H") {
				original = r.original.H;
				sur = r.significance.H.surrogate_mean;
			} else if (spec.parameter == "W") {
				original = r.original.W;
				sur = r.significance.W.surrogate_mean;
			} else {
				original = r.original.A;
				sur = r.significance.A.surrogate_mean;
			}
			++h.original[spec.bin_of(original)];
			++h.surrogate_mean[spec.bin_of(sur)];
		}
		out.push_back(std::move(h));
	}
	return out;
}

std::string emit_histograms(const std::vector<SummaryRow>& rows) {
	std::string out = "parameter,bin_lo,bin_hi,original,surrogate_mean\n";
	for (const auto& h : compute_histograms(rows)) {
		for (std::size_t b = 0; b < h.spec.bins(); ++b) {
			const double lo = h.spec.lo + h.spec.step * static_cast<double>(b);
			const double hi = h.spec.lo + h.spec.step * static_cast<double>(b + 1);
			out += h.spec.parameter + ',' + format_double(lo) + ',' + format_double(hi) + ',' +
			       std::to_string(h.original[b]) + ',' + std::to_string(h.surrogate_mean[b]) + '\n';
		}
	}
	return out;
}

namespace {

std::string station_id_for(const fs::path& file, const IngestConfig& ingest) {
	(void)ingest;
	return file.stem().string();
}

StationOutcome process_station(const fs::path& file, const PipelineConfig& cfg) {
	StationOutcome outcome;
	outcome.source = file.filename().string();
	outcome.station_id = station_id_for(file, cfg.ingest);
	const fs::path rel_dir = fs::path("stations") / outcome.station_id;
	auto emit = [&](const std::string& name, const std::string& content) {
		const auto rel = (rel_dir / name).generic_string();
		write_file(cfg.output_dir / rel, content);
		outcome.files.push_back(rel);
	};
	try {
		std::vector<core::GapEntry> gaps;
		auto ts = load_station(file, cfg.ingest, &gaps);
		ts.station_id = outcome.station_id;
		for (auto& g : gaps) {
			g.station_id = outcome.station_id;
		}
		if (!gaps.empty()) {
			std::ostringstream report;
			core::write_gap_report(report, gaps);
			emit("gaps.jsonl", report.str());
		}

		std::vector<double> analysed = ts.values;
		if (cfg.stl_enabled) {
			const auto decomposition = stl::stl_decompose(ts, cfg.stl);
			emit("stl.csv", stl_csv(ts, decomposition));
			analysed = decomposition.remainder;
		}

		// Distribution ranking works on the (daily) values themselves.
		const double shift = positive_shift(ts.values);
		std::vector<double> shifted = ts.values;
		for (double& v : shifted) {
			v += shift;
		}
		const auto ranked = distfit::rank_distributions(shifted);
		emit("fit.json", fit_json(outcome.station_id, ranked, shift).dump(2) + "\n");

		const auto core = mfdfa::analyze_core(analysed, cfg.mfdfa);
		std::optional<mfdfa::MultifractalSummary> summary;
		std::string summary_error;
		try {
			summary = mfdfa::spectrum_summary(core.spectrum, core.hurst);
		} catch (const mfdfa::SpectrumFitError& e) {
			summary_error = e.what();
		}
		emit("mfdfa.json", mfdfa_json(outcome.station_id, cfg.mfdfa, core, summary, summary_error).dump(2) + "\n");
		if (cfg.write_matrices) {
			emit("fluctuation.csv", fluctuation_csv(core.surface));
			emit("hurst.csv", hurst_csv(core.hurst, core.spectrum));
			emit("spectrum.csv", spectrum_csv(core.spectrum));
		}
		if (!summary) {
			throw mfdfa::SpectrumFitError(summary_error);
		}

		const auto ensemble = surrogate::surrogate_ensemble(analysed, cfg.mfdfa, cfg.surrogate.n,
		                                                    cfg.surrogate.base_seed, *summary, 1, outcome.station_id);
		const auto report = surrogate::significance(ensemble);
		emit("surrogate.json", surrogate_json(ensemble, report).dump(2) + "\n");

		SummaryRow row;
		row.station_id = outcome.station_id;
		row.original = *summary;
		row.significance = report;
		if (!ranked.empty() && ranked.front().ok()) {
			row.best_family = std::string(distfit::family_name(ranked.front().family));
		}
		outcome.row = row;
		outcome.ok = true;
	} catch (const std::exception& e) {
		outcome.ok = false;
		outcome.error = e.what();
	}
	return outcome;
}

ordered_json file_entry(const PipelineConfig& cfg, const std::string& rel) {
	return {{"path", rel}, {"sha256", sha256_file(cfg.output_dir / rel)}};
}

}  // namespace

ordered_json write_maps(const MapConfig& cfg, const fs::path& catalog, const std::vector<std::string>& station_ids,
                        const std::vector<MapField>& fields, const fs::path& output_dir, std::size_t jobs,
                        std::vector<std::string>& files) {
	ordered_json status;
	if (catalog.empty()) {
		status["status"] = "skipped";
		status["reason"] = "no station catalog configured";
		return status;
	}
	std::map<std::string, core::StationMeta> by_id;
	for (const auto& s : core::load_station_catalog(catalog)) {
		by_id.emplace(s.station_id, s);
	}
	std::vector<std::size_t> usable;
	std::vector<const core::StationMeta*> coords;
	for (std::size_t i = 0; i < station_ids.size(); ++i) {
		const auto it = by_id.find(station_ids[i]);
		if (it != by_id.end()) {
			usable.push_back(i);
			coords.push_back(&it->second);
		}
	}
	if (usable.size() < cfg.min_stations) {
		status["status"] = "skipped";
		status["reason"] = "only " + std::to_string(usable.size()) + " analysed stations with coordinates (need " +
		                   std::to_string(cfg.min_stations) + ")";
		return status;
	}

	const auto n = static_cast<Eigen::Index>(usable.size());
	Eigen::MatrixXd x(n, 2);
	for (Eigen::Index i = 0; i < n; ++i) {
		x(i, 0) = coords[static_cast<std::size_t>(i)]->x;
		x(i, 1) = coords[static_cast<std::size_t>(i)]->y;
	}
	elm::BoundingBox bbox;
	if (cfg.bbox) {
		bbox = *cfg.bbox;
	} else {
		const double pad_x = 0.05 * std::max(x.col(0).maxCoeff() - x.col(0).minCoeff(), cfg.resolution);
		const double pad_y = 0.05 * std::max(x.col(1).maxCoeff() - x.col(1).minCoeff(), cfg.resolution);
		bbox = {x.col(0).minCoeff() - pad_x, x.col(1).minCoeff() - pad_y, x.col(0).maxCoeff() + pad_x,
		        x.col(1).maxCoeff() + pad_y};
	}

	ordered_json sidecar;
	sidecar["activation"] = "sigmoid";
	sidecar["input_weight_range"] = {-1.0, 1.0};
	sidecar["bias_range"] = {0.0, 1.0};
	sidecar["inputs"] = {"x", "y"};
	sidecar["seed"] = cfg.seed;
	sidecar["holdout_fraction"] = cfg.holdout_fraction;
	sidecar["resolution"] = cfg.resolution;
	sidecar["bbox"] = {bbox.x_min, bbox.y_min, bbox.x_max, bbox.y_max};
	sidecar["n_stations"] = usable.size();
	sidecar["maps"] = ordered_json::object();
	for (const auto& field : fields) {
		if (field.values.size() != station_ids.size()) {
			throw std::invalid_argument("map field " + field.name + " does not have one value per station");
		}
		Eigen::VectorXd y(n);
		for (Eigen::Index i = 0; i < n; ++i) {
			y(i) = field.values[usable[static_cast<std::size_t>(i)]];
		}
		const auto selection = elm::select_hidden_nodes(x, y, cfg.candidates, cfg.holdout_fraction, cfg.seed);
		const auto model = elm::train_elm(x, y, selection.best_hidden_count, cfg.seed);
		const auto grid = elm::predict_grid(model, bbox, cfg.resolution, jobs);
		const auto rel = "maps/" + field.name + ".asc";
		write_file(output_dir / rel, ascii_grid(grid));
		files.push_back(rel);

		ordered_json m;
		m["file"] = rel;
		m["hidden_count"] = selection.best_hidden_count;
		m["holdout_rmse"] = selection.best_test_rmse;
		m["holdout_r2"] = selection.best_test_r2;
		ordered_json cands = ordered_json::array();
		for (const auto& c : selection.candidates) {
			ordered_json cj;
			cj["hidden_count"] = c.hidden_count;
			cj["test_rmse"] = c.test_rmse ? ordered_json(*c.test_rmse) : ordered_json(nullptr);
			if (!c.note.empty()) {
				cj["note"] = c.note;
			}
			cands.push_back(cj);
		}
		m["candidates"] = cands;
		m["n_cols"] = grid.n_cols;
		m["n_rows"] = grid.n_rows;
		sidecar["maps"][field.name] = m;
	}
	write_file(output_dir / "maps/maps.json", sidecar.dump(2) + "\n");
	files.push_back("maps/maps.json");
	status["status"] = "ok";
	return status;
}

std::vector<MapField> summary_fields(const std::vector<SummaryRow>& rows) {
	std::vector<MapField> fields{{"H_original", {}}, {"W_original", {}}, {"A_original", {}},
	                             {"H_shuffled", {}}, {"W_shuffled", {}}, {"A_shuffled", {}}};
	for (const auto& r : rows) {
		fields[0].values.push_back(r.original.H);
		fields[1].values.push_back(r.original.W);
		fields[2].values.push_back(r.original.A);
		fields[3].values.push_back(r.significance.H.surrogate_mean);
		fields[4].values.push_back(r.significance.W.surrogate_mean);
		fields[5].values.push_back(r.significance.A.surrogate_mean);
	}
	return fields;
}

RunResult run_pipeline(const PipelineConfig& cfg) {
	cfg.validate();
	const auto inputs = cfg.input_files();
	fs::create_directories(cfg.output_dir);

	RunResult result;
	result.stations.resize(inputs.size());
	core::parallel_for(inputs.size(), cfg.jobs,
	                   [&](std::size_t i) { result.stations[i] = process_station(inputs[i], cfg); });

	std::vector<SummaryRow> rows;
	for (const auto& s : result.stations) {
		if (s.ok) {
			rows.push_back(*s.row);
		}
	}

	std::vector<std::string> outputs;
	write_file(cfg.output_dir / "summary.csv", summary_csv(rows));
	outputs.push_back("summary.csv");
	ordered_json map_status;
	if (!rows.empty()) {
		write_file(cfg.output_dir / "histograms.csv", emit_histograms(rows));
		outputs.push_back("histograms.csv");
		try {
			std::vector<std::string> ids;
			for (const auto& r : rows) {
				ids.push_back(r.station_id);
			}
			map_status = write_maps(cfg.map, cfg.catalog, ids, summary_fields(rows), cfg.output_dir, cfg.jobs, outputs);
		} catch (const std::exception& e) {
			map_status = {{"status", "failed"}, {"reason", e.what()}};
		}
	} else {
		map_status = {{"status", "skipped"}, {"reason", "no station analysed successfully"}};
	}

	ordered_json manifest;
	manifest["settings"] = analysis_settings_json(cfg);
	manifest["stations"] = ordered_json::array();
	for (const auto& s : result.stations) {
		ordered_json entry;
		entry["station_id"] = s.station_id;
		entry["source"] = s.source;
		entry["status"] = s.ok ? "ok" : "failed";
		if (!s.ok) {
			entry["error"] = s.error;
		}
		entry["files"] = ordered_json::array();
		for (const auto& f : s.files) {
			entry["files"].push_back(file_entry(cfg, f));
		}
		manifest["stations"].push_back(entry);
	}
	manifest["outputs"] = ordered_json::array();
	for (const auto& f : outputs) {
		manifest["outputs"].push_back(file_entry(cfg, f));
	}
	manifest["map"] = map_status;
	write_file(cfg.output_dir / "manifest.json", manifest.dump(2) + "\n");
	result.manifest = std::move(manifest);
	result.exit_code = rows.empty() ? kExitAllStationsFailed : kExitOk;
	return result;
}

}  // namespace mfwind::pipeline
