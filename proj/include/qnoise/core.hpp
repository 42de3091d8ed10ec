#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace qnoise {

// CODATA 2018 exact values.
inline constexpr double kPlanck = 6.62607015e-34;      // J s
inline constexpr double kSpeedOfLight = 299792458.0;   // m/s

/// One optical mode: real carrier amplitude plus Gaussian quadrature
/// fluctuation RMS values. Amplitude is in photons^(1/2) per integration
/// window, so the mean photon number is amplitude^2.
struct ModeState {
  double amplitude = 0.0;   // real carrier, >= 0
  double quad1_rms = 0.5;   // in-phase fluctuation RMS
  double quad2_rms = 0.5;   // orthogonal fluctuation RMS
  double squeeze = 0.0;     // s; e^(-s) on the target quadrature
  int squeeze_quadrature = 1;  // 1 or 2

  ModeState() = default;
  ModeState(double amp, double q1, double q2, double s = 0.0, int squeeze_quad = 1)
      : amplitude(amp), quad1_rms(q1), quad2_rms(q2), squeeze(s),
        squeeze_quadrature(squeeze_quad) {
    if (!(amp >= 0.0) || !std::isfinite(amp))
      throw std::domain_error("ModeState: amplitude must be finite and >= 0");
    if (q1 < 0.0 || q2 < 0.0)
      throw std::domain_error("ModeState: quadrature RMS must be >= 0");
    if (squeeze_quad != 1 && squeeze_quad != 2)
      throw std::domain_error("ModeState: squeeze quadrature must be 1 or 2");
  }

  static ModeState coherent(double amplitude) {
    return ModeState(amplitude, 0.5, 0.5);
  }
  static ModeState vacuum() { return coherent(0.0); }

  /// Squeezing multiplies the target quadrature RMS by e^(-s) and the
  /// conjugate one by e^(+s), preserving the uncertainty product.
  double effective_quad1_rms() const {
    return quad1_rms * std::exp(squeeze_quadrature == 1 ? -squeeze : squeeze);
  }
  double effective_quad2_rms() const {
    return quad2_rms * std::exp(squeeze_quadrature == 2 ? -squeeze : squeeze);
  }

  double mean_photons() const { return amplitude * amplitude; }

  /// Compose additional squeezing on the same target quadrature.
  ModeState squeezed(double extra) const {
    ModeState out = *this;
    out.squeeze += extra;
    return out;
  }
};

/// Lossless beam splitter (or steering mirror treated as one).
/// r and t are real; the pi phase sits on the b->d path.
struct SplitterSpec {
  double reflectance = 0.5;
  double transmittance = 0.5;

  SplitterSpec() = default;
  SplitterSpec(double R, double T) : reflectance(R), transmittance(T) {
    if (R < 0.0 || R > 1.0 || T < 0.0 || T > 1.0)
      throw std::domain_error("SplitterSpec: R and T must lie in [0,1]");
    if (std::abs(R + T - 1.0) > 1e-12)
      throw std::domain_error("SplitterSpec: R + T must equal 1");
  }

  static SplitterSpec symmetric() { return SplitterSpec(0.5, 0.5); }
  static SplitterSpec from_reflectance(double R) { return SplitterSpec(R, 1.0 - R); }

  double r() const { return std::sqrt(reflectance); }
  double t() const { return std::sqrt(transmittance); }
};

enum class SchemeKind {
  Direct,
  BHD,
  BWDD,
  BWDDIndependent,
  MirrorBWDD,
  MichelsonFree,
  MichelsonAnchored,
  Centroid,
};

inline std::string to_string(SchemeKind k) {
  switch (k) {
    case SchemeKind::Direct: return "direct";
    case SchemeKind::BHD: return "bhd";
    case SchemeKind::BWDD: return "bwdd";
    case SchemeKind::BWDDIndependent: return "bwdd-independent";
    case SchemeKind::MirrorBWDD: return "mirror-bwdd";
    case SchemeKind::MichelsonFree: return "michelson-free";
    case SchemeKind::MichelsonAnchored: return "michelson-anchored";
    case SchemeKind::Centroid: return "centroid";
  }
  return "unknown";
}

/// One detection configuration. Kind-specific parameters share the struct;
/// only the fields relevant to the kind are read.
struct Scheme {
  SchemeKind kind = SchemeKind::Direct;
  double split_p = 0.5;          // BWDD wavefront fraction P (Q = 1 - P)
  SplitterSpec mirror{};         // MirrorBWDD R:T mirror
  std::size_t pixel_count = 16;  // Centroid
  int cross_quadrature = 1;      // MichelsonAnchored: which b quadrature mixes in

  static Scheme direct() { return {SchemeKind::Direct}; }
  static Scheme bhd() { return {SchemeKind::BHD}; }
  static Scheme bwdd(double p = 0.5) {
    if (!(p > 0.0) || !(p < 1.0))
      throw std::domain_error("Scheme: BWDD imbalance P must lie in (0,1)");
    Scheme s{SchemeKind::BWDD};
    s.split_p = p;
    return s;
  }
  static Scheme bwdd_independent() { return {SchemeKind::BWDDIndependent}; }
  static Scheme mirror_bwdd(SplitterSpec mirror) {
    Scheme s{SchemeKind::MirrorBWDD};
    s.mirror = mirror;
    return s;
  }
  static Scheme michelson_free() { return {SchemeKind::MichelsonFree}; }
  static Scheme michelson_anchored(int cross_quadrature = 1) {
    if (cross_quadrature != 1 && cross_quadrature != 2)
      throw std::domain_error("Scheme: cross quadrature must be 1 or 2");
    Scheme s{SchemeKind::MichelsonAnchored};
    s.cross_quadrature = cross_quadrature;
    return s;
  }
  static Scheme centroid(std::size_t pixels) {
    if (pixels < 2)
      throw std::domain_error("Scheme: centroid needs at least 2 pixels");
    Scheme s{SchemeKind::Centroid};
    s.pixel_count = pixels;
    return s;
  }

  double split_q() const { return 1.0 - split_p; }
};

enum class Model { ModeFluctuation, StateReduction };

inline std::string to_string(Model m) {
  return m == Model::ModeFluctuation ? "mode" : "state";
}

/// Empirical statistics of a batch of difference-signal draws, next to the
/// active model's closed-form prediction.
struct RunResult {
  std::size_t samples = 0;
  double empirical_mean = 0.0;
  double empirical_variance = 0.0;
  double mean_stderr = 0.0;
  double variance_stderr = 0.0;
  double analytic_mean = 0.0;
  double analytic_variance = 0.0;
};

/// Optional classical noise terms, both off by default.
struct NoiseOptions {
  double technical_rms = 0.0;  // common-mode relative intensity noise
  double dark_nep_w = 0.0;     // detector NEP in W/sqrt(Hz)
};

struct ExperimentConfig {
  Scheme scheme{};
  Model model = Model::ModeFluctuation;
  double power_watts = 1e-3;
  double wavelength_m = 633e-9;
  double window_s = 1e-6;
  std::size_t samples = 100000;
  std::uint64_t seed = 0;
  double squeeze = 0.0;
  int squeeze_quadrature = 1;
  NoiseOptions noise{};
  unsigned threads = 1;
};

/// photons/s carried by an optical beam of the given power and wavelength.
inline double photon_flux(double power_watts, double wavelength_m) {
  if (!std::isfinite(power_watts) || power_watts < 0.0)
    throw std::domain_error("photon_flux: power must be finite and >= 0");
  if (!(wavelength_m > 0.0))
    throw std::domain_error("photon_flux: wavelength must be > 0");
  return power_watts * wavelength_m / (kPlanck * kSpeedOfLight);
}

inline double window_photons(double flux, double window_s) {
  if (!(flux >= 0.0)) throw std::domain_error("window_photons: flux must be >= 0");
  if (!(window_s > 0.0)) throw std::domain_error("window_photons: window must be > 0");
  return flux * window_s;
}

inline double mean_photons(const ExperimentConfig& cfg) {
  return window_photons(photon_flux(cfg.power_watts, cfg.wavelength_m), cfg.window_s);
}

/// Inverse of the flux/window conversions: the optical power that delivers
/// n_bar photons per window.
inline double power_for_photons(double n_bar, double wavelength_m, double window_s) {
  if (!(n_bar >= 0.0)) throw std::domain_error("power_for_photons: n_bar must be >= 0");
  if (!(wavelength_m > 0.0) || !(window_s > 0.0))
    throw std::domain_error("power_for_photons: wavelength and window must be > 0");
  return n_bar * kPlanck * kSpeedOfLight / (wavelength_m * window_s);
}

}  // namespace qnoise
