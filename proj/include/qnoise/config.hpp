#pragma once

#include <charconv>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qnoise/core.hpp"

namespace qnoise::config {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct ParsedConfig {
  ExperimentConfig cfg{};
  std::vector<double> sweep_powers;      // [sweep] powers, empty if absent
  std::vector<std::string> warnings;     // unknown keys under --lenient
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline double parse_real(std::string_view v, std::size_t line, const std::string& key) {
  try {
    std::size_t pos = 0;
    double x = std::stod(std::string(v), &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (const std::exception&) {
    throw ConfigError(line, "invalid number for '" + key + "': " + std::string(v));
  }
}

inline std::uint64_t parse_uint(std::string_view v, std::size_t line,
                                const std::string& key) {
  std::uint64_t x = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc{} || p != v.data() + v.size())
    throw ConfigError(line, "invalid integer for '" + key + "': " + std::string(v));
  return x;
}

inline SchemeKind parse_scheme_kind(std::string_view v, std::size_t line) {
  if (v == "direct") return SchemeKind::Direct;
  if (v == "bhd") return SchemeKind::BHD;
  if (v == "bwdd") return SchemeKind::BWDD;
  if (v == "bwdd-independent") return SchemeKind::BWDDIndependent;
  if (v == "mirror-bwdd") return SchemeKind::MirrorBWDD;
  if (v == "michelson-free") return SchemeKind::MichelsonFree;
  if (v == "michelson-anchored") return SchemeKind::MichelsonAnchored;
  if (v == "centroid") return SchemeKind::Centroid;
  throw ConfigError(line, "unknown scheme '" + std::string(v) + "'");
}

inline Model parse_model(std::string_view v, std::size_t line) {
  if (v == "mode") return Model::ModeFluctuation;
  if (v == "state") return Model::StateReduction;
  throw ConfigError(line, "unknown model '" + std::string(v) + "'");
}

}  // namespace detail

/// Parse the line-oriented key = value experiment description. Sections:
/// top-level experiment keys, [scheme] for kind-specific parameters and
/// [sweep] for the power list. Unknown keys are errors unless lenient.
inline ParsedConfig parse_config(std::string_view text, bool lenient = false) {
  using detail::trim;
  ParsedConfig out;
  ExperimentConfig& cfg = out.cfg;

  enum class Section { Top, Scheme, Sweep };
  Section section = Section::Top;

  bool have_scheme = false, have_model = false, have_power = false,
       have_wavelength = false, have_window = false, have_samples = false,
       have_seed = false;
  std::optional<double> scheme_p;
  std::optional<double> scheme_reflectance;
  std::optional<std::uint64_t> scheme_pixels;
  std::optional<std::uint64_t> scheme_quadrature;

  std::istringstream stream{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(stream, raw)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(line_no, "unterminated section header");
      std::string_view name = trim(line.substr(1, line.size() - 2));
      if (name == "scheme") section = Section::Scheme;
      else if (name == "sweep") section = Section::Sweep;
      else throw ConfigError(line_no, "unknown section [" + std::string(name) + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(line_no, "expected 'key = value'");
    std::string key{trim(line.substr(0, eq))};
    std::string_view value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError(line_no, "expected 'key = value'");

    auto unknown = [&] {
      if (lenient) {
        out.warnings.push_back("line " + std::to_string(line_no) +
                               ": ignoring unknown key '" + key + "'");
      } else {
        throw ConfigError(line_no, "unknown key '" + key + "'");
      }
    };

    if (section == Section::Top) {
      if (key == "scheme") {
        cfg.scheme.kind = detail::parse_scheme_kind(value, line_no);
        have_scheme = true;
      } else if (key == "model") {
        cfg.model = detail::parse_model(value, line_no);
        have_model = true;
      } else if (key == "power") {
        cfg.power_watts = detail::parse_real(value, line_no, key);
        if (cfg.power_watts < 0.0) throw ConfigError(line_no, "power must be >= 0");
        have_power = true;
      } else if (key == "wavelength") {
        cfg.wavelength_m = detail::parse_real(value, line_no, key);
        if (!(cfg.wavelength_m > 0.0))
          throw ConfigError(line_no, "wavelength must be > 0");
        have_wavelength = true;
      } else if (key == "window") {
        cfg.window_s = detail::parse_real(value, line_no, key);
        if (!(cfg.window_s > 0.0)) throw ConfigError(line_no, "window must be > 0");
        have_window = true;
      } else if (key == "samples") {
        cfg.samples = detail::parse_uint(value, line_no, key);
        if (cfg.samples < 100)
          throw ConfigError(line_no, "samples must be at least 100");
        have_samples = true;
      } else if (key == "seed") {
        cfg.seed = detail::parse_uint(value, line_no, key);
        have_seed = true;
      } else if (key == "squeeze") {
        cfg.squeeze = detail::parse_real(value, line_no, key);
      } else if (key == "squeeze_quadrature") {
        auto q = detail::parse_uint(value, line_no, key);
        if (q != 1 && q != 2)
          throw ConfigError(line_no, "squeeze_quadrature must be 1 or 2");
        cfg.squeeze_quadrature = static_cast<int>(q);
      } else if (key == "threads") {
        cfg.threads = static_cast<unsigned>(detail::parse_uint(value, line_no, key));
        if (cfg.threads == 0) throw ConfigError(line_no, "threads must be >= 1");
      } else if (key == "technical_noise") {
        cfg.noise.technical_rms = detail::parse_real(value, line_no, key);
        if (cfg.noise.technical_rms < 0.0)
          throw ConfigError(line_no, "technical_noise must be >= 0");
      } else if (key == "dark_nep") {
        cfg.noise.dark_nep_w = detail::parse_real(value, line_no, key);
        if (cfg.noise.dark_nep_w < 0.0)
          throw ConfigError(line_no, "dark_nep must be >= 0");
      } else {
        unknown();
      }
    } else if (section == Section::Scheme) {
      if (key == "p") {
        scheme_p = detail::parse_real(value, line_no, key);
        if (!(*scheme_p > 0.0) || !(*scheme_p < 1.0))
          throw ConfigError(line_no, "imbalance p must lie in (0,1)");
      } else if (key == "reflectance") {
        scheme_reflectance = detail::parse_real(value, line_no, key);
        if (*scheme_reflectance < 0.0 || *scheme_reflectance > 1.0)
          throw ConfigError(line_no, "reflectance must lie in [0,1]");
      } else if (key == "pixels") {
        scheme_pixels = detail::parse_uint(value, line_no, key);
        if (*scheme_pixels < 2) throw ConfigError(line_no, "pixels must be >= 2");
      } else if (key == "quadrature") {
        scheme_quadrature = detail::parse_uint(value, line_no, key);
        if (*scheme_quadrature != 1 && *scheme_quadrature != 2)
          throw ConfigError(line_no, "quadrature must be 1 or 2");
      } else {
        unknown();
      }
    } else {  // Sweep
      if (key == "powers") {
        std::string list{value};
        std::istringstream items{list};
        std::string item;
        while (std::getline(items, item, ',')) {
          std::string_view v = trim(item);
          if (v.empty()) throw ConfigError(line_no, "empty entry in powers list");
          double p = detail::parse_real(v, line_no, key);
          if (p < 0.0) throw ConfigError(line_no, "sweep powers must be >= 0");
          out.sweep_powers.push_back(p);
        }
        if (out.sweep_powers.empty())
          throw ConfigError(line_no, "powers list is empty");
      } else {
        unknown();
      }
    }
  }

  if (!have_scheme) throw ConfigError(line_no, "missing required key 'scheme'");
  if (!have_model) throw ConfigError(line_no, "missing required key 'model'");
  if (!have_power) throw ConfigError(line_no, "missing required key 'power'");
  if (!have_wavelength) throw ConfigError(line_no, "missing required key 'wavelength'");
  if (!have_window) throw ConfigError(line_no, "missing required key 'window'");
  if (!have_samples) throw ConfigError(line_no, "missing required key 'samples'");
  if (!have_seed) throw ConfigError(line_no, "missing required key 'seed'");

  if (scheme_p && cfg.scheme.kind == SchemeKind::BWDD) cfg.scheme.split_p = *scheme_p;
  if (scheme_reflectance && cfg.scheme.kind == SchemeKind::MirrorBWDD)
    cfg.scheme.mirror = SplitterSpec::from_reflectance(*scheme_reflectance);
  if (scheme_pixels && cfg.scheme.kind == SchemeKind::Centroid)
    cfg.scheme.pixel_count = *scheme_pixels;
  if (scheme_quadrature && cfg.scheme.kind == SchemeKind::MichelsonAnchored)
    cfg.scheme.cross_quadrature = static_cast<int>(*scheme_quadrature);

  if (cfg.model == Model::StateReduction && cfg.squeeze != 0.0)
    throw ConfigError(line_no,
                      "squeeze is not supported under the state-reduction model");
  return out;
}

}  // namespace qnoise::config
