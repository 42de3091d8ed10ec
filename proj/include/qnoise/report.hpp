#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qnoise/core.hpp"

namespace qnoise::report {

inline constexpr const char* kToolVersion = "1.0.0";

inline constexpr const char* kCsvHeader =
    "power_watts,scheme,model,samples,mean,variance,mean_stderr,"
    "variance_stderr,analytic_mean,analytic_variance";

/// 17 significant digits, enough to reproduce any double exactly.
inline std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

struct ReportRow {
  double power_watts = 0.0;
  std::string scheme;
  std::string model;
  RunResult result{};
};

struct FitSummary {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double intercept_stderr = 0.0;
  double pearson_r = 0.0;
};

struct Verdict {
  bool agree = false;
  double variance_ratio = 0.0;
  double mode_variance = 0.0;
  double state_variance = 0.0;
};

struct ReportDocument {
  std::string config_echo;  // canonical config text; re-running it reproduces the rows
  std::uint64_t seed = 0;
  std::vector<ReportRow> rows;
  std::vector<FitSummary> fits;
  std::vector<Verdict> verdicts;
};

/// Canonical config text that reproduces the run when fed back to the tool.
inline std::string echo_config(const ExperimentConfig& cfg,
                               const std::vector<double>& sweep_powers = {}) {
  std::string text;
  text += "scheme = " + to_string(cfg.scheme.kind) + "\n";
  text += "model = " + to_string(cfg.model) + "\n";
  text += "power = " + format_real(cfg.power_watts) + "\n";
  text += "wavelength = " + format_real(cfg.wavelength_m) + "\n";
  text += "window = " + format_real(cfg.window_s) + "\n";
  text += "samples = " + std::to_string(cfg.samples) + "\n";
  text += "seed = " + std::to_string(cfg.seed) + "\n";
  if (cfg.squeeze != 0.0) {
    text += "squeeze = " + format_real(cfg.squeeze) + "\n";
    text += "squeeze_quadrature = " + std::to_string(cfg.squeeze_quadrature) + "\n";
  }
  if (cfg.threads != 1) text += "threads = " + std::to_string(cfg.threads) + "\n";
  if (cfg.noise.technical_rms != 0.0)
    text += "technical_noise = " + format_real(cfg.noise.technical_rms) + "\n";
  if (cfg.noise.dark_nep_w != 0.0)
    text += "dark_nep = " + format_real(cfg.noise.dark_nep_w) + "\n";

  std::string scheme_section;
  switch (cfg.scheme.kind) {
    case SchemeKind::BWDD:
      if (cfg.scheme.split_p != 0.5)
        scheme_section += "p = " + format_real(cfg.scheme.split_p) + "\n";
      break;
    case SchemeKind::MirrorBWDD:
      scheme_section +=
          "reflectance = " + format_real(cfg.scheme.mirror.reflectance) + "\n";
      break;
    case SchemeKind::Centroid:
      scheme_section += "pixels = " + std::to_string(cfg.scheme.pixel_count) + "\n";
      break;
    case SchemeKind::MichelsonAnchored:
      scheme_section +=
          "quadrature = " + std::to_string(cfg.scheme.cross_quadrature) + "\n";
      break;
    default:
      break;
  }
  if (!scheme_section.empty()) text += "[scheme]\n" + scheme_section;
  if (!sweep_powers.empty()) {
    text += "[sweep]\npowers = ";
    for (std::size_t i = 0; i < sweep_powers.size(); ++i) {
      if (i) text += ", ";
      text += format_real(sweep_powers[i]);
    }
    text += "\n";
  }
  return text;
}

inline std::string csv_text(const ReportDocument& doc) {
  std::string out{kCsvHeader};
  out += "\n";
  for (const auto& row : doc.rows) {
    const RunResult& r = row.result;
    out += format_real(row.power_watts) + "," + row.scheme + "," + row.model + "," +
           std::to_string(r.samples) + "," + format_real(r.empirical_mean) + "," +
           format_real(r.empirical_variance) + "," + format_real(r.mean_stderr) + "," +
           format_real(r.variance_stderr) + "," + format_real(r.analytic_mean) + "," +
           format_real(r.analytic_variance) + "\n";
  }
  return out;
}

inline nlohmann::json json_document(const ReportDocument& doc) {
  nlohmann::json j;
  j["tool_version"] = kToolVersion;
  j["seed"] = doc.seed;
  j["config"] = doc.config_echo;
  j["runs"] = nlohmann::json::array();
  for (const auto& row : doc.rows) {
    const RunResult& r = row.result;
    j["runs"].push_back({{"power_watts", row.power_watts},
                         {"scheme", row.scheme},
                         {"model", row.model},
                         {"samples", r.samples},
                         {"mean", r.empirical_mean},
                         {"variance", r.empirical_variance},
                         {"mean_stderr", r.mean_stderr},
                         {"variance_stderr", r.variance_stderr},
                         {"analytic_mean", r.analytic_mean},
                         {"analytic_variance", r.analytic_variance}});
  }
  for (const auto& fit : doc.fits) {
    j["fits"].push_back({{"slope", fit.slope},
                         {"intercept", fit.intercept},
                         {"slope_stderr", fit.slope_stderr},
                         {"intercept_stderr", fit.intercept_stderr},
                         {"pearson_r", fit.pearson_r}});
  }
  for (const auto& v : doc.verdicts) {
    j["verdicts"].push_back({{"agree", v.agree},
                             {"variance_ratio", v.variance_ratio},
                             {"mode_variance", v.mode_variance},
                             {"state_variance", v.state_variance}});
  }
  return j;
}

/// Write via a temp file in the same directory, then rename into place.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

inline void emit_report(const ReportDocument& doc, const std::filesystem::path& out_dir) {
  if (doc.rows.empty())
    throw std::invalid_argument("emit_report: no completed runs to report");
  std::filesystem::create_directories(out_dir);
  write_atomic(out_dir / "report.csv", csv_text(doc));
  write_atomic(out_dir / "report.json", json_document(doc).dump(2) + "\n");
}

}  // namespace qnoise::report
