#include "mfwind/core/parallel.hpp"
#include "mfwind/distfit/fit.hpp"
#include "mfwind/pipeline/config.hpp"
#include "mfwind/pipeline/io.hpp"
#include "mfwind/pipeline/pipeline.hpp"
#include "mfwind/synth/synth.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <fstream>
#include <iostream>
#include <map>

namespace fs = std::filesystem;
using namespace mfwind;

namespace {

constexpr const char* kFormats = R"(Formats:
  input CSV      header row required. Raw station files carry a timestamp column
                 (default "time": YYYY-MM-DD HH:MM[:SS], ISO "T" form or
                 YYYYMMDDHHMM) and a value column (default "value"); they are
                 aggregated to daily means. Files without the timestamp column
                 are read as daily series from the value column. Empty cells and
                 "-", "NA", "NaN", "-9999" count as missing.
  catalog CSV    station_id,x,y[,altitude] with projected coordinates in metres.
  config JSON    sections ingest, stl, mfdfa, surrogate, map plus input_dir,
                 catalog, output_dir, jobs, write_matrices (see README).
  stl.csv        date,trend,seasonal,remainder
  fit.json       {station_id, shift, fits:[{family, params, log_likelihood, kl}], best_family}
  mfdfa.json     config echo, F_q(s), h(q) with stderr, tau, (alpha, f), summary
                 {H, H_stderr, W, A, alpha0, alpha1, alpha2}
  surrogate.json {station_id, original:{H,W,A}, surrogate:{n, n_failed,
                 H|W|A:{original, mean, std, z, percentile, p_two_sided}}}
  summary.csv    one row per station: H, H_stderr, W, A, surrogate means/stds, z-scores
  histograms.csv parameter,bin_lo,bin_hi,original,surrogate_mean
  maps/*.asc     ESRI ASCII grid (ncols, nrows, xllcorner, yllcorner, cellsize,
                 NODATA_value), rows north to south; maps/maps.json holds the
                 ELM metadata and holdout RMSE.
  manifest.json  every output with its SHA-256, plus per-station status.
Exit codes: 0 success, 1 configuration error, 2 every station failed.)";

struct Globals {
	std::string config;
	std::optional<std::uint64_t> seed;
	std::optional<std::size_t> jobs;
	std::string output;
};

pipeline::PipelineConfig resolve(const Globals& g) {
	pipeline::PipelineConfig cfg;
	if (!g.config.empty()) {
		cfg = pipeline::load_config(g.config);
	}
	if (g.seed) {
		cfg.surrogate.base_seed = *g.seed;
		cfg.map.seed = *g.seed;
	}
	if (g.jobs) {
		if (*g.jobs == 0) {
			throw pipeline::ConfigError("--jobs must be at least 1");
		}
		cfg.jobs = *g.jobs;
	}
	if (!g.output.empty()) {
		cfg.output_dir = g.output;
	}
	return cfg;
}

fs::path station_dir(const pipeline::PipelineConfig& cfg, const std::string& id) {
	return cfg.output_dir / id;
}

core::TimeSeries load(const fs::path& file, const pipeline::PipelineConfig& cfg) {
	auto ts = pipeline::load_station(file, cfg.ingest);
	ts.station_id = file.stem().string();
	return ts;
}

std::vector<double> analysed_values(const core::TimeSeries& ts, const pipeline::PipelineConfig& cfg, bool skip_stl) {
	if (skip_stl) {
		return ts.values;
	}
	return stl::stl_decompose(ts, cfg.stl).remainder;
}

// Runs `work` on every file, reporting failures; exit 2 when all fail.
template <class Work>
int for_each_file(const std::vector<std::string>& files, const pipeline::PipelineConfig& cfg, Work&& work) {
	std::vector<std::string> errors(files.size());
	core::parallel_for(files.size(), cfg.jobs, [&](std::size_t i) {
		try {
			work(fs::path(files[i]));
		} catch (const std::exception& e) {
			errors[i] = e.what();
		}
	});
	std::size_t failed = 0;
	for (std::size_t i = 0; i < files.size(); ++i) {
		if (!errors[i].empty()) {
			++failed;
			std::cerr << files[i] << ": " << errors[i] << '\n';
		}
	}
	return failed == files.size() ? pipeline::kExitAllStationsFailed : pipeline::kExitOk;
}

int cmd_map(const pipeline::PipelineConfig& cfg, const std::string& catalog, const std::vector<std::string>& files) {
	// station -> field -> value
	std::map<std::string, std::map<std::string, double>> values;
	for (const auto& f : files) {
		std::ifstream in(f);
		if (!in) {
			throw pipeline::ConfigError("cannot open " + f);
		}
		const auto j = nlohmann::json::parse(in);
		const auto id = j.at("station_id").get<std::string>();
		auto& row = values[id];
		if (j.contains("summary") && j["summary"].is_object()) {
			for (const char* p : {"H", "W", "A"}) {
				row[std::string(p) + "_original"] = j["summary"].at(p).get<double>();
			}
		}
		if (j.contains("surrogate") && j["surrogate"].is_object()) {
			for (const char* p : {"H", "W", "A"}) {
				row[std::string(p) + "_original"] = j.at("original").at(p).get<double>();
				row[std::string(p) + "_shuffled"] = j["surrogate"].at(p).at("mean").get<double>();
			}
		}
	}
	std::vector<std::string> ids;
	for (const auto& [id, row] : values) {
		if (!row.empty()) {
			ids.push_back(id);
		}
	}
	if (ids.empty()) {
		std::cerr << "no summary values found in the given JSON files\n";
		return pipeline::kExitAllStationsFailed;
	}
	std::vector<pipeline::MapField> fields;
	for (const char* name : {"H_original", "W_original", "A_original", "H_shuffled", "W_shuffled", "A_shuffled"}) {
		pipeline::MapField field{name, {}};
		for (const auto& id : ids) {
			const auto it = values[id].find(name);
			if (it == values[id].end()) {
				break;
			}
			field.values.push_back(it->second);
		}
		if (field.values.size() == ids.size()) {
			fields.push_back(std::move(field));
		}
	}
	std::vector<std::string> written;
	const auto status = pipeline::write_maps(cfg.map, catalog, ids, fields, cfg.output_dir, cfg.jobs, written);
	std::cout << status.dump() << '\n';
	return status.at("status") == "ok" ? pipeline::kExitOk : pipeline::kExitAllStationsFailed;
}

}  // namespace

int main(int argc, char** argv) {
	CLI::App app{"Multifractal analysis of daily wind-speed series: STL decomposition, distribution ranking, "
	             "MFDFA, shuffled surrogates and ELM mapping."};
	app.footer(kFormats);
	app.require_subcommand(1);
	app.fallthrough();

	Globals g;
	app.add_option("--config", g.config, "JSON configuration file")->check(CLI::ExistingFile);
	app.add_option("--seed", g.seed, "overrides surrogate base seed, ELM seed and synth seed");
	app.add_option("--jobs", g.jobs, "parallel station jobs (default 1)");
	app.add_option("--output", g.output, "output directory");

	std::vector<std::string> files;

	auto* decompose = app.add_subcommand("decompose", "STL decomposition; writes <output>/<station>/stl.csv");
	decompose->add_option("files", files, "station CSV files")->required()->check(CLI::ExistingFile);

	auto* fitdist = app.add_subcommand("fit-dist", "Weibull/Gamma/GEV ranking by KL; writes <station>/fit.json");
	fitdist->add_option("files", files, "station CSV files")->required()->check(CLI::ExistingFile);

	bool skip_stl = false;
	bool write_csv = false;
	auto* mfdfa_cmd = app.add_subcommand("mfdfa", "MFDFA of the STL remainder; writes <station>/mfdfa.json");
	mfdfa_cmd->add_option("files", files, "station CSV files")->required()->check(CLI::ExistingFile);
	mfdfa_cmd->add_flag("--skip-stl", skip_stl, "analyse the series as given (no decomposition)");
	mfdfa_cmd->add_flag("--csv", write_csv, "also write fluctuation.csv, hurst.csv, spectrum.csv");

	std::optional<std::size_t> n_surrogates;
	auto* surrogate_cmd = app.add_subcommand("surrogate", "shuffled-surrogate test; writes <station>/surrogate.json");
	surrogate_cmd->add_option("files", files, "station CSV files")->required()->check(CLI::ExistingFile);
	surrogate_cmd->add_option("-n,--n-surrogates", n_surrogates, "number of surrogates (default 1000)");
	surrogate_cmd->add_flag("--skip-stl", skip_stl, "analyse the series as given (no decomposition)");

	std::string catalog;
	auto* map_cmd = app.add_subcommand("map", "ELM maps from mfdfa.json / surrogate.json files");
	map_cmd->add_option("--catalog", catalog, "station catalog CSV")->required()->check(CLI::ExistingFile);
	map_cmd->add_option("files", files, "mfdfa.json or surrogate.json files")->required()->check(CLI::ExistingFile);

	std::string kind;
	std::string name;
	synth::CascadeSpec cascade;
	std::size_t length = 65536;
	double hurst = 0.8;
	auto* synth_cmd = app.add_subcommand("synth", "synthetic series as single-column CSV (<output>/<name>.csv)");
	synth_cmd->add_option("kind", kind, "cascade | white | fgn")
	    ->required()
	    ->check(CLI::IsMember({"cascade", "white", "fgn"}));
	synth_cmd->add_option("--levels", cascade.levels, "cascade levels (length 2^levels)");
	synth_cmd->add_option("--a", cascade.a, "cascade multiplier in (0.5, 1)");
	synth_cmd->add_option("--length", length, "series length (power of 2 for fgn)");
	synth_cmd->add_option("--hurst", hurst, "fGn Hurst exponent in (0, 1)");
	synth_cmd->add_option("--name", name, "file stem (default: kind)");

	std::string input_dir;
	auto* run_cmd = app.add_subcommand("run", "full pipeline over every CSV in the input directory");
	run_cmd->add_option("--input", input_dir, "input directory (overrides config)");
	run_cmd->add_option("--catalog", catalog, "station catalog CSV (overrides config)");

	try {
		app.parse(argc, argv);
	} catch (const CLI::CallForHelp& e) {
		return app.exit(e);
	} catch (const CLI::ParseError& e) {
		app.exit(e);
		return pipeline::kExitConfigError;
	}

	try {
		auto cfg = resolve(g);
		if (*decompose) {
			return for_each_file(files, cfg, [&](const fs::path& f) {
				const auto ts = load(f, cfg);
				const auto d = stl::stl_decompose(ts, cfg.stl);
				pipeline::write_file(station_dir(cfg, ts.station_id) / "stl.csv", pipeline::stl_csv(ts, d));
			});
		}
		if (*fitdist) {
			return for_each_file(files, cfg, [&](const fs::path& f) {
				const auto ts = load(f, cfg);
				const double shift = pipeline::positive_shift(ts.values);
				auto shifted = ts.values;
				for (double& v : shifted) {
					v += shift;
				}
				const auto ranked = distfit::rank_distributions(shifted);
				pipeline::write_file(station_dir(cfg, ts.station_id) / "fit.json",
				                     pipeline::fit_json(ts.station_id, ranked, shift).dump(2) + "\n");
			});
		}
		if (*mfdfa_cmd) {
			cfg.mfdfa.validate();
			return for_each_file(files, cfg, [&](const fs::path& f) {
				const auto ts = load(f, cfg);
				const auto x = analysed_values(ts, cfg, skip_stl);
				const auto core = mfdfa::analyze_core(x, cfg.mfdfa);
				std::optional<mfdfa::MultifractalSummary> summary;
				std::string error;
				try {
					summary = mfdfa::spectrum_summary(core.spectrum, core.hurst);
				} catch (const mfdfa::SpectrumFitError& e) {
					error = e.what();
				}
				const auto dir = station_dir(cfg, ts.station_id);
				pipeline::write_file(dir / "mfdfa.json",
				                     pipeline::mfdfa_json(ts.station_id, cfg.mfdfa, core, summary, error).dump(2) + "\n");
				if (write_csv) {
					pipeline::write_file(dir / "fluctuation.csv", pipeline::fluctuation_csv(core.surface));
					pipeline::write_file(dir / "hurst.csv", pipeline::hurst_csv(core.hurst, core.spectrum));
					pipeline::write_file(dir / "spectrum.csv", pipeline::spectrum_csv(core.spectrum));
				}
				if (!summary) {
					throw mfdfa::SpectrumFitError(error);
				}
			});
		}
		if (*surrogate_cmd) {
			cfg.mfdfa.validate();
			const std::size_t n = n_surrogates.value_or(cfg.surrogate.n);
			return for_each_file(files, cfg, [&](const fs::path& f) {
				const auto ts = load(f, cfg);
				const auto x = analysed_values(ts, cfg, skip_stl);
				const auto ens = surrogate::surrogate_ensemble(x, cfg.mfdfa, n, cfg.surrogate.base_seed, 1, ts.station_id);
				pipeline::write_file(station_dir(cfg, ts.station_id) / "surrogate.json",
				                     pipeline::surrogate_json(ens, surrogate::significance(ens)).dump(2) + "\n");
			});
		}
		if (*map_cmd) {
			return cmd_map(cfg, catalog, files);
		}
		if (*synth_cmd) {
			const std::uint64_t seed = g.seed.value_or(1);
			core::TimeSeries ts;
			if (kind == "cascade") {
				cascade.seed = seed;
				ts = synth::binomial_cascade(cascade);
			} else if (kind == "white") {
				ts = synth::white_noise(length, seed);
			} else {
				ts = synth::fractional_noise(hurst, length, seed);
			}
			const auto path = cfg.output_dir / ((name.empty() ? kind : name) + ".csv");
			pipeline::write_file(path, pipeline::series_csv(ts.values));
			std::cout << path.string() << '\n';
			return pipeline::kExitOk;
		}
		if (*run_cmd) {
			if (!input_dir.empty()) {
				cfg.input_dir = input_dir;
			}
			if (!catalog.empty()) {
				cfg.catalog = catalog;
			}
			const auto result = pipeline::run_pipeline(cfg);
			std::size_t ok = 0;
			for (const auto& s : result.stations) {
				if (s.ok) {
					++ok;
				} else {
					std::cerr << s.station_id << ": " << s.error << '\n';
				}
			}
			std::cout << ok << "/" << result.stations.size() << " stations analysed; map "
			          << result.manifest["map"]["status"].get<std::string>() << "; outputs in "
			          << cfg.output_dir.string() << '\n';
			return result.exit_code;
		}
	} catch (const pipeline::ConfigError& e) {
		std::cerr << "configuration error: " << e.what() << '\n';
		return pipeline::kExitConfigError;
	} catch (const std::invalid_argument& e) {
		std::cerr << "invalid argument: " << e.what() << '\n';
		return pipeline::kExitConfigError;
	} catch (const std::exception& e) {
		std::cerr << "error: " << e.what() << '\n';
		return pipeline::kExitAllStationsFailed;
	}
	return pipeline::kExitOk;
}
