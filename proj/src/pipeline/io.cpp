#include "mfwind/pipeline/io.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mfwind::pipeline {

using nlohmann::ordered_json;

namespace {

ordered_json number_or_null(double v) {
	return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
}

ordered_json significance_json(const surrogate::ParameterSignificance& s) {
	ordered_json j;
	j["original"] = number_or_null(s.original);
	j["mean"] = number_or_null(s.surrogate_mean);
	j["std"] = number_or_null(s.surrogate_std);
	j["z"] = s.z ? number_or_null(*s.z) : ordered_json(nullptr);
	j["percentile"] = s.percentile;
	j["p_two_sided"] = s.p_two_sided;
	return j;
}

}  // namespace

std::string format_double(double value) {
	if (std::isnan(value)) {
		return "nan";
	}
	if (std::isinf(value)) {
		return value > 0 ? "inf" : "-inf";
	}
	char buf[64];
	const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
	if (ec != std::errc{}) {
		throw std::runtime_error("number formatting failed");
	}
	return std::string(buf, ptr);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
	if (path.has_parent_path()) {
		std::filesystem::create_directories(path.parent_path());
	}
	std::ofstream out(path, std::ios::binary | std::ios::trunc);
	if (!out) {
		throw std::runtime_error("cannot write '" + path.string() + "'");
	}
	out << content;
	if (!out) {
		throw std::runtime_error("write failed for '" + path.string() + "'");
	}
}

std::string sha256_hex(const std::string& bytes) {
	unsigned char digest[EVP_MAX_MD_SIZE];
	unsigned int len = 0;
	if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
		throw std::runtime_error("SHA-256 computation failed");
	}
	static constexpr char kHex[] = "0123456789abcdef";
	std::string hex;
	hex.reserve(2 * len);
	for (unsigned int i = 0; i < len; ++i) {
		hex.push_back(kHex[digest[i] >> 4]);
		hex.push_back(kHex[digest[i] & 0xF]);
	}
	return hex;
}

std::string sha256_file(const std::filesystem::path& path) {
	std::ifstream in(path, std::ios::binary);
	if (!in) {
		throw std::runtime_error("cannot read '" + path.string() + "'");
	}
	std::ostringstream buf;
	buf << in.rdbuf();
	return sha256_hex(buf.str());
}

std::string stl_csv(const core::TimeSeries& ts, const stl::StlDecomposition& d) {
	std::string out = "date,trend,seasonal,remainder\n";
	for (std::size_t i = 0; i < d.trend.size(); ++i) {
		const auto date = ts.start_date + std::chrono::days{static_cast<long>(i) * ts.step};
		out += core::format_date(date);
		out += ',' + format_double(d.trend[i]) + ',' + format_double(d.seasonal[i]) + ',' +
		       format_double(d.remainder[i]) + '\n';
	}
	return out;
}

std::string series_csv(std::span<const double> values) {
	std::string out = "value\n";
	for (double v : values) {
		out += format_double(v) + '\n';
	}
	return out;
}

ordered_json fit_json(const std::string& station_id, const std::vector<distfit::RankedFamily>& ranked, double shift) {
	ordered_json j;
	j["station_id"] = station_id;
	j["shift"] = shift;
	j["fits"] = ordered_json::array();
	for (const auto& r : ranked) {
		ordered_json f;
		f["family"] = std::string(distfit::family_name(r.family));
		ordered_json params = ordered_json::object();
		if (r.fit) {
			for (const auto& [name, value] : r.fit->named_params()) {
				params[name] = number_or_null(value);
			}
			f["log_likelihood"] = number_or_null(r.fit->log_likelihood);
		}
		f["params"] = params;
		f["kl"] = number_or_null(r.kl);
		if (!r.ok()) {
			f["error"] = r.error;
		}
		j["fits"].push_back(f);
	}
	if (!ranked.empty() && ranked.front().ok()) {
		j["best_family"] = std::string(distfit::family_name(ranked.front().family));
	} else {
		j["best_family"] = nullptr;
	}
	return j;
}

ordered_json summary_json(const mfdfa::MultifractalSummary& s) {
	ordered_json j;
	j["H"] = s.H;
	j["H_stderr"] = s.H_stderr;
	j["W"] = s.W;
	j["A"] = s.A;
	j["alpha0"] = s.alpha0;
	j["alpha1"] = s.alpha1;
	j["alpha2"] = s.alpha2;
	j["fit_coeffs"] = s.fit_coeffs;
	return j;
}

ordered_json mfdfa_json(const std::string& station_id, const mfdfa::MfdfaConfig& cfg, const mfdfa::MfdfaCore& core,
                        const std::optional<mfdfa::MultifractalSummary>& summary, const std::string& summary_error) {
	ordered_json j;
	j["station_id"] = station_id;
	j["config"] = {{"q_grid", cfg.q_grid}, {"scales", cfg.scales()}, {"detrend_degree", cfg.detrend_degree}};
	const auto& surface = core.surface;
	ordered_json rows = ordered_json::array();
	for (std::size_t k = 0; k < surface.q_grid.size(); ++k) {
		ordered_json row = ordered_json::array();
		for (std::size_t s = 0; s < surface.scales.size(); ++s) {
			row.push_back(surface.at(k, s));
		}
		rows.push_back(row);
	}
	j["fluctuation"] = {{"q_grid", surface.q_grid},
	                    {"scales", surface.scales},
	                    {"segments_per_scale", surface.n_segments_per_scale},
	                    {"floored_variances", surface.floored_variances},
	                    {"F", rows}};
	j["hurst"] = {{"q", core.hurst.q_grid}, {"h", core.hurst.h}, {"stderr", core.hurst.std_error}, {"r2", core.hurst.r2}};
	j["tau"] = core.spectrum.tau;
	ordered_json spectrum = ordered_json::array();
	for (std::size_t i = 0; i < core.spectrum.alpha.size(); ++i) {
		spectrum.push_back({{"q", core.spectrum.spectrum_q[i]},
		                    {"alpha", core.spectrum.alpha[i]},
		                    {"f", core.spectrum.f_alpha[i]}});
	}
	j["spectrum"] = spectrum;
	if (summary) {
		j["summary"] = summary_json(*summary);
	} else {
		j["summary"] = nullptr;
		j["summary_error"] = summary_error;
	}
	j["notes"] = {"H is the generalized Hurst exponent at q = 2; it equals the Hurst exponent for stationary series."};
	return j;
}

ordered_json surrogate_json(const surrogate::SurrogateEnsemble& ens, const surrogate::SignificanceReport& report) {
	ordered_json j;
	j["station_id"] = ens.station_id;
	j["original"] = {{"H", ens.original.H}, {"W", ens.original.W}, {"A", ens.original.A}};
	ordered_json s;
	s["n"] = ens.n_surrogates;
	s["n_failed"] = ens.n_failed;
	s["H"] = significance_json(report.H);
	s["W"] = significance_json(report.W);
	s["A"] = significance_json(report.A);
	j["surrogate"] = s;
	return j;
}

std::string fluctuation_csv(const mfdfa::FluctuationSurface& surface) {
	std::string out = "scale";
	for (double q : surface.q_grid) {
		out += ",F_q" + format_double(q);
	}
	out += '\n';
	for (std::size_t s = 0; s < surface.scales.size(); ++s) {
		out += std::to_string(surface.scales[s]);
		for (std::size_t k = 0; k < surface.q_grid.size(); ++k) {
			out += ',' + format_double(surface.at(k, s));
		}
		out += '\n';
	}
	return out;
}

std::string hurst_csv(const mfdfa::GeneralizedHurst& gh, const mfdfa::MultifractalSpectrum& spec) {
	std::string out = "q,h,stderr,r2,tau\n";
	for (std::size_t i = 0; i < gh.q_grid.size(); ++i) {
		out += format_double(gh.q_grid[i]) + ',' + format_double(gh.h[i]) + ',' + format_double(gh.std_error[i]) + ',' +
		       format_double(gh.r2[i]) + ',' + format_double(spec.tau[i]) + '\n';
	}
	return out;
}

std::string spectrum_csv(const mfdfa::MultifractalSpectrum& spec) {
	std::string out = "q,alpha,f\n";
	for (std::size_t i = 0; i < spec.alpha.size(); ++i) {
		out += format_double(spec.spectrum_q[i]) + ',' + format_double(spec.alpha[i]) + ',' +
		       format_double(spec.f_alpha[i]) + '\n';
	}
	return out;
}

std::string ascii_grid(const elm::GridMap& grid, double nodata) {
	std::string out;
	out += "ncols " + std::to_string(grid.n_cols) + '\n';
	out += "nrows " + std::to_string(grid.n_rows) + '\n';
	out += "xllcorner " + format_double(grid.x_min) + '\n';
	out += "yllcorner " + format_double(grid.y_min) + '\n';
	out += "cellsize " + format_double(grid.resolution) + '\n';
	out += "NODATA_value " + format_double(nodata) + '\n';
	for (std::size_t r = grid.n_rows; r-- > 0;) {
		for (std::size_t c = 0; c < grid.n_cols; ++c) {
			if (c) {
				out += ' ';
			}
			const double v = grid.at(r, c);
			out += format_double(std::isfinite(v) ? v : nodata);
		}
		out += '\n';
	}
	return out;
}

}  // namespace mfwind::pipeline
