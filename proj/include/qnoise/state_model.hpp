#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "qnoise/core.hpp"
#include "qnoise/rng.hpp"

namespace qnoise::state_model {

/// Above this mean a rounded Gaussian replaces the exact Poisson draw
/// (relative error O(1/sqrt(mean)), far below any test tolerance here).
inline constexpr double kGaussianApproxThreshold = 1e4;

inline std::int64_t sample_poisson(double mean, RngStream& rng) {
  if (!std::isfinite(mean) || mean < 0.0)
    throw std::domain_error("sample_poisson: mean must be finite and >= 0");
  if (mean == 0.0) return 0;
  if (mean > kGaussianApproxThreshold) {
    double draw = mean + std::sqrt(mean) * rng.normal();
    return draw <= 0.0 ? 0 : std::llround(draw);
  }
  std::poisson_distribution<std::int64_t> dist(mean);
  return dist(rng);
}

struct CountSample {
  std::int64_t n_c = 0;
  std::int64_t n_d = 0;
};

/// Collapse of the total beam followed by a binomial split between the two
/// detectors. Poisson thinning makes the marginals independent Poissons with
/// means p_c * total_mean and (1 - p_c) * total_mean.
inline CountSample sample_split_counts(double total_mean, double p_c, RngStream& rng) {
  if (p_c < 0.0 || p_c > 1.0)
    throw std::domain_error("sample_split_counts: p_c must lie in [0,1]");
  std::int64_t total = sample_poisson(total_mean, rng);
  std::int64_t n_c = 0;
  if (total > 0) {
    if (p_c >= 1.0) {
      n_c = total;
    } else if (p_c > 0.0) {
      std::binomial_distribution<std::int64_t> dist(total, p_c);
      n_c = dist(rng);
    }
  }
  return {n_c, total - n_c};
}

struct Prediction {
  double mean = 0.0;
  double variance = 0.0;
};

/// Each detector collapses its share of the beam independently, so the
/// difference variance is N_c + N_d regardless of how the beam was split.
inline Prediction analytic_prediction(const Scheme& scheme, double total_mean) {
  if (!std::isfinite(total_mean) || total_mean < 0.0)
    throw std::domain_error("analytic_prediction: total_mean must be >= 0");
  switch (scheme.kind) {
    case SchemeKind::Direct:
      return {total_mean, total_mean};
    case SchemeKind::BHD:
    case SchemeKind::MichelsonFree:
    case SchemeKind::BWDDIndependent:
    case SchemeKind::Centroid:
      return {0.0, total_mean};
    case SchemeKind::BWDD: {
      const double imbalance = scheme.split_p - scheme.split_q();
      return {imbalance * total_mean, total_mean};
    }
    case SchemeKind::MirrorBWDD: {
      // Straight half sees N/2, steered half R*N/2; the leak is lost light.
      const double R = scheme.mirror.reflectance;
      return {0.5 * (1.0 - R) * total_mean, 0.5 * (1.0 + R) * total_mean};
    }
    case SchemeKind::MichelsonAnchored:
      throw std::invalid_argument(
          "analytic_prediction: the state-reduction model does not define the "
          "anchored Michelson scheme");
  }
  throw std::invalid_argument("analytic_prediction: unsupported scheme kind");
}

/// One difference-signal draw under state reduction.
inline double mc_delta_n(const Scheme& scheme, double total_mean, RngStream& rng) {
  switch (scheme.kind) {
    case SchemeKind::Direct:
      return static_cast<double>(sample_poisson(total_mean, rng));
    case SchemeKind::BHD:
    case SchemeKind::MichelsonFree:
    case SchemeKind::BWDDIndependent:
    case SchemeKind::Centroid: {
      CountSample s = sample_split_counts(total_mean, 0.5, rng);
      return static_cast<double>(s.n_c - s.n_d);
    }
    case SchemeKind::BWDD: {
      CountSample s = sample_split_counts(total_mean, scheme.split_p, rng);
      return static_cast<double>(s.n_c - s.n_d);
    }
    case SchemeKind::MirrorBWDD: {
      // Detected means: straight half N/2, steered half R*N/2.
      const double R = scheme.mirror.reflectance;
      const double detected = 0.5 * (1.0 + R) * total_mean;
      CountSample s = sample_split_counts(detected, 1.0 / (1.0 + R), rng);
      return static_cast<double>(s.n_c - s.n_d);
    }
    default:
      throw std::invalid_argument("state_model::mc_delta_n: unsupported scheme kind");
  }
}

}  // namespace qnoise::state_model
