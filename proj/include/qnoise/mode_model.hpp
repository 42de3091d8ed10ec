#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include "qnoise/core.hpp"
#include "qnoise/rng.hpp"

namespace qnoise::mode_model {

/// One pair of quadrature fluctuation draws for a mode.
struct FluctuationSample {
  double d1 = 0.0;
  double d2 = 0.0;
};

/// Complex field amplitude after transforms.
struct FieldAmplitude {
  double re = 0.0;
  double im = 0.0;
};

inline FluctuationSample sample_fluctuations(const ModeState& mode, RngStream& rng) {
  auto [z1, z2] = rng.normal_pair();
  return {mode.effective_quad1_rms() * z1, mode.effective_quad2_rms() * z2};
}

/// Full field of a mode for one integration window: carrier plus one
/// fluctuation draw.
inline FieldAmplitude sample_field(const ModeState& mode, RngStream& rng) {
  FluctuationSample f = sample_fluctuations(mode, rng);
  return {mode.amplitude + f.d1, f.d2};
}

/// c = r a + t b ; d = t a - r b. The pi phase sits on the b -> d path.
inline std::pair<FieldAmplitude, FieldAmplitude> beamsplitter_transform(
    const FieldAmplitude& a_in, const FieldAmplitude& b_in, const SplitterSpec& bs) {
  const double r = bs.r();
  const double t = bs.t();
  FieldAmplitude c{r * a_in.re + t * b_in.re, r * a_in.im + t * b_in.im};
  FieldAmplitude d{t * a_in.re - r * b_in.re, t * a_in.im - r * b_in.im};
  return {c, d};
}

/// Square-law detection, |alpha|^2. Keeps the full square; the second-order
/// fluctuation terms the closed forms drop are retained here.
inline double detect(const FieldAmplitude& amp) {
  return amp.re * amp.re + amp.im * amp.im;
}

/// Field arriving at the detector behind an R:T steering mirror: reflected
/// half-wavefront superposed with the vacuum leaking through. The reflection
/// sign is an overall factor on the output field and cannot survive
/// square-law detection.
inline FieldAmplitude mirror_output_field(const FieldAmplitude& half,
                                          const FieldAmplitude& vacuum_leak,
                                          const SplitterSpec& mirror,
                                          double reflection_sign = -1.0) {
  const double r = mirror.r();
  const double t = mirror.t();
  return {reflection_sign * (r * half.re + t * vacuum_leak.re),
          reflection_sign * (r * half.im + t * vacuum_leak.im)};
}

/// Intensities at the two detectors for one window. delta_n = first - second.
struct DetectorPair {
  double first = 0.0;
  double second = 0.0;
};

inline DetectorPair mc_detector_pair(const Scheme& scheme, const ModeState& mode_a,
                                     const ModeState& mode_b, RngStream& rng) {
  switch (scheme.kind) {
    case SchemeKind::Direct:
      return {detect(sample_field(mode_a, rng)), 0.0};
    case SchemeKind::BHD:
    case SchemeKind::MichelsonFree: {
      FieldAmplitude a = sample_field(mode_a, rng);
      FieldAmplitude b = sample_field(mode_b, rng);
      auto [c, d] = beamsplitter_transform(a, b, SplitterSpec::symmetric());
      return {detect(c), detect(d)};
    }
    case SchemeKind::BWDD:
    case SchemeKind::Centroid: {
      // One mode, one draw: both wavefront sections carry the same field.
      const double intensity = detect(sample_field(mode_a, rng));
      const double p = scheme.kind == SchemeKind::BWDD ? scheme.split_p : 0.5;
      return {p * intensity, (1.0 - p) * intensity};
    }
    case SchemeKind::BWDDIndependent: {
      // Counterfactual postulate: each half-wavefront fluctuates on its own.
      const double upper = detect(sample_field(mode_a, rng));
      const double lower = detect(sample_field(mode_a, rng));
      return {0.5 * upper, 0.5 * lower};
    }
    case SchemeKind::MirrorBWDD: {
      FieldAmplitude full = sample_field(mode_a, rng);
      FieldAmplitude half{full.re / std::numbers::sqrt2, full.im / std::numbers::sqrt2};
      FluctuationSample leak = sample_fluctuations(mode_b, rng);
      FieldAmplitude steered =
          mirror_output_field(half, {leak.d1, leak.d2}, scheme.mirror);
      return {detect(half), detect(steered)};
    }
    case SchemeKind::MichelsonAnchored: {
      // Single-detector fluctuation about the mean at the anchored fringe.
      FluctuationSample da = sample_fluctuations(mode_a, rng);
      FluctuationSample db = sample_fluctuations(mode_b, rng);
      const double cross = scheme.cross_quadrature == 1 ? db.d1 : db.d2;
      return {mode_a.amplitude * (da.d1 + cross), 0.0};
    }
  }
  throw std::invalid_argument("mc_detector_pair: unsupported scheme kind");
}

/// One draw of the scheme's difference signal.
inline double mc_delta_n(const Scheme& scheme, const ModeState& mode_a,
                         const ModeState& mode_b, RngStream& rng) {
  DetectorPair pair = mc_detector_pair(scheme, mode_a, mode_b, rng);
  return pair.first - pair.second;
}

struct Prediction {
  double mean = 0.0;
  double variance = 0.0;
};

/// Closed-form (mean, variance) of the difference signal, leading order.
inline Prediction analytic_variance(const Scheme& scheme, const ModeState& mode_a,
                                    const ModeState& mode_b) {
  const double a = mode_a.amplitude;
  const double a2 = a * a;
  const double qa1 = mode_a.effective_quad1_rms();
  const double qb1 = mode_b.effective_quad1_rms();
  const double qb2 = mode_b.effective_quad2_rms();
  switch (scheme.kind) {
    case SchemeKind::Direct:
      return {a2, 4.0 * a2 * qa1 * qa1};
    case SchemeKind::BHD:
    case SchemeKind::MichelsonFree:
      // Only the cross interference term with the b mode survives.
      return {2.0 * a * mode_b.amplitude, 4.0 * a2 * qb1 * qb1};
    case SchemeKind::BWDD: {
      const double imbalance = scheme.split_p - scheme.split_q();
      return {imbalance * a2, 4.0 * imbalance * imbalance * a2 * qa1 * qa1};
    }
    case SchemeKind::Centroid:
      return {0.0, 0.0};
    case SchemeKind::BWDDIndependent:
      return {0.0, 2.0 * a2 * qa1 * qa1};
    case SchemeKind::MirrorBWDD: {
      const double R = scheme.mirror.reflectance;
      const double T = scheme.mirror.transmittance;
      return {0.5 * (1.0 - R) * a2,
              (1.0 - R) * (1.0 - R) * a2 * qa1 * qa1 + 2.0 * R * T * a2 * qb1 * qb1};
    }
    case SchemeKind::MichelsonAnchored: {
      const double qb = scheme.cross_quadrature == 1 ? qb1 : qb2;
      return {0.0, a2 * (qa1 * qa1 + qb * qb)};
    }
  }
  throw std::invalid_argument("analytic_variance: unsupported scheme kind");
}

struct DetectorVariances {
  double vc = 0.0;
  double vd = 0.0;
  double cov = 0.0;
};

/// Per-detector variances of a symmetric-splitter homodyne. Both detectors
/// carry equal contributions from the a and b mode fluctuations; the
/// covariance makes V(delta N) = Vc + Vd - 2 Cov = 4 a^2 qb1^2.
inline DetectorVariances detector_variances_bhd(const ModeState& mode_a,
                                                const ModeState& mode_b) {
  const double a2 = mode_a.amplitude * mode_a.amplitude;
  const double qa1 = mode_a.effective_quad1_rms();
  const double qb1 = mode_b.effective_quad1_rms();
  const double v = a2 * (qa1 * qa1 + qb1 * qb1);
  return {v, v, a2 * (qa1 * qa1 - qb1 * qb1)};
}

}  // namespace qnoise::mode_model
