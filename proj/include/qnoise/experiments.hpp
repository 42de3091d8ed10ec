#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "qnoise/core.hpp"
#include "qnoise/mode_model.hpp"
#include "qnoise/rng.hpp"
#include "qnoise/state_model.hpp"

namespace qnoise::experiments {

namespace detail {

/// Evaluate draw(i) for i in [0, n) into a vector, fanned out over threads.
/// Each index owns its RNG stream, so the result is identical for any
/// worker count; the statistics are then reduced in index order.
inline std::vector<double> sample_indexed(std::size_t n, unsigned threads,
                                          const std::function<double(std::size_t)>& draw) {
  std::vector<double> out(n);
  const unsigned workers = std::max(1u, threads);
  if (workers == 1 || n < 2 * workers) {
    for (std::size_t i = 0; i < n; ++i) out[i] = draw(i);
    return out;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      for (std::size_t i = lo; i < hi; ++i) out[i] = draw(i);
    });
  }
  for (auto& t : pool) t.join();
  return out;
}

inline std::pair<double, double> mean_and_variance(std::span<const double> xs) {
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, ss / (n - 1.0)};
}

/// Dark-noise RMS in photons per window for a detector of the given NEP,
/// taking the window's equivalent noise bandwidth 1/(2 tau).
inline double dark_photons_rms(double nep_w, double window_s, double wavelength_m) {
  const double photon_energy = kPlanck * kSpeedOfLight / wavelength_m;
  return nep_w * std::sqrt(window_s / 2.0) / photon_energy;
}

inline std::pair<ModeState, ModeState> build_modes(const ExperimentConfig& cfg) {
  const double amp = std::sqrt(mean_photons(cfg));
  ModeState a = ModeState::coherent(amp);
  ModeState b = ModeState::vacuum();
  // The squeeze targets the open-port vacuum where one exists, otherwise
  // the beam itself.
  switch (cfg.scheme.kind) {
    case SchemeKind::BHD:
    case SchemeKind::MirrorBWDD:
    case SchemeKind::MichelsonFree:
    case SchemeKind::MichelsonAnchored:
      b = ModeState(0.0, 0.5, 0.5, cfg.squeeze, cfg.squeeze_quadrature);
      break;
    default:
      a = ModeState(amp, 0.5, 0.5, cfg.squeeze, cfg.squeeze_quadrature);
      break;
  }
  return {a, b};
}

}  // namespace detail

inline void validate(const ExperimentConfig& cfg) {
  if (cfg.samples < 100)
    throw std::invalid_argument("run_experiment: at least 100 samples required");
  if (cfg.model == Model::StateReduction && cfg.squeeze != 0.0)
    throw std::invalid_argument(
        "run_experiment: squeezing is not defined under the state-reduction model");
  if (!std::isfinite(mean_photons(cfg)))
    throw std::invalid_argument("run_experiment: mean photon number is not finite");
}

inline RunResult run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  const double n_bar = mean_photons(cfg);
  auto [mode_a, mode_b] = detail::build_modes(cfg);
  const double dark_rms =
      detail::dark_photons_rms(cfg.noise.dark_nep_w, cfg.window_s, cfg.wavelength_m);
  const bool differential = cfg.scheme.kind != SchemeKind::Direct &&
                            cfg.scheme.kind != SchemeKind::MichelsonAnchored;
  const double dark_delta_rms = dark_rms * (differential ? std::numbers::sqrt2 : 1.0);

  RunResult result;
  result.samples = cfg.samples;
  if (cfg.model == Model::ModeFluctuation) {
    auto pred = mode_model::analytic_variance(cfg.scheme, mode_a, mode_b);
    result.analytic_mean = pred.mean;
    result.analytic_variance = pred.variance;
  } else {
    auto pred = state_model::analytic_prediction(cfg.scheme, n_bar);
    result.analytic_mean = pred.mean;
    result.analytic_variance = pred.variance;
  }

  auto draw = [&](std::size_t i) {
    RngStream rng(cfg.seed, i);
    double delta;
    if (cfg.model == Model::ModeFluctuation) {
      delta = mode_model::mc_delta_n(cfg.scheme, mode_a, mode_b, rng);
      if (cfg.noise.technical_rms > 0.0)
        delta *= 1.0 + cfg.noise.technical_rms * rng.normal();
    } else {
      double mean = n_bar;
      if (cfg.noise.technical_rms > 0.0)
        mean *= std::max(0.0, 1.0 + cfg.noise.technical_rms * rng.normal());
      delta = state_model::mc_delta_n(cfg.scheme, mean, rng);
    }
    if (dark_delta_rms > 0.0) delta += dark_delta_rms * rng.normal();
    return delta;
  };

  std::vector<double> deltas = detail::sample_indexed(cfg.samples, cfg.threads, draw);
  auto [mean, variance] = detail::mean_and_variance(deltas);
  result.empirical_mean = mean;
  result.empirical_variance = variance;
  result.mean_stderr = std::sqrt(variance / static_cast<double>(cfg.samples));
  result.variance_stderr =
      variance * std::sqrt(2.0 / static_cast<double>(cfg.samples - 1));
  return result;
}

struct SweepRow {
  double power_watts = 0.0;
  Model model = Model::ModeFluctuation;
  RunResult result{};
};

struct SweepTable {
  std::vector<SweepRow> rows;
  double slope = 0.0;            // variance per watt
  double intercept = 0.0;        // photons^2
  double slope_stderr = 0.0;
  double intercept_stderr = 0.0;
  double pearson_r = 0.0;
};

/// One run per power plus a least-squares line of variance vs power.
inline SweepTable power_sweep(const Scheme& scheme, Model model,
                              std::vector<double> powers,
                              const ExperimentConfig& base) {
  if (powers.size() < 3)
    throw std::invalid_argument("power_sweep: at least 3 powers required");
  for (double p : powers)
    if (!(p >= 0.0)) throw std::invalid_argument("power_sweep: powers must be >= 0");
  std::sort(powers.begin(), powers.end());
  if (powers.front() == powers.back())
    throw std::invalid_argument("power_sweep: degenerate fit, all powers equal");

  SweepTable table;
  table.rows.reserve(powers.size());
  for (double p : powers) {
    ExperimentConfig cfg = base;
    cfg.scheme = scheme;
    cfg.model = model;
    cfg.power_watts = p;
    table.rows.push_back({p, model, run_experiment(cfg)});
  }

  const double n = static_cast<double>(powers.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (const auto& row : table.rows) {
    const double x = row.power_watts;
    const double y = row.result.empirical_variance;
    sx += x; sy += y; sxx += x * x; sxy += x * y; syy += y * y;
  }
  const double denom = n * sxx - sx * sx;
  table.slope = (n * sxy - sx * sy) / denom;
  table.intercept = (sy - table.slope * sx) / n;

  double ss_res = 0.0;
  for (const auto& row : table.rows) {
    const double r = row.result.empirical_variance -
                     (table.slope * row.power_watts + table.intercept);
    ss_res += r * r;
  }
  const double dof = std::max(1.0, n - 2.0);
  const double sigma2 = ss_res / dof;
  table.slope_stderr = std::sqrt(n * sigma2 / denom);
  table.intercept_stderr = std::sqrt(sigma2 * sxx / denom);

  const double cov_num = n * sxy - sx * sy;
  const double var_y = n * syy - sy * sy;
  table.pearson_r = var_y > 0.0 ? cov_num / std::sqrt(denom * var_y) : 0.0;
  return table;
}

struct CentroidResult {
  std::size_t split_index = 0;
  double delta_n = 0.0;  // left minus right at the fixed midpoint
};

/// Fixed-midpoint difference plus the balancing-index search; the paper's
/// two framings of the same measurement.
inline CentroidResult centroid(std::span<const double> pixels) {
  if (pixels.size() < 2)
    throw std::domain_error("centroid: at least 2 pixels required");
  for (double p : pixels)
    if (!(p >= 0.0)) throw std::domain_error("centroid: pixel counts must be >= 0");
  const double total = std::accumulate(pixels.begin(), pixels.end(), 0.0);

  CentroidResult out;
  const std::size_t mid = pixels.size() / 2;
  double left_mid = std::accumulate(pixels.begin(), pixels.begin() + mid, 0.0);
  out.delta_n = left_mid - (total - left_mid);

  double best = std::abs(0.0 - total);
  out.split_index = 0;
  double left = 0.0;
  for (std::size_t k = 1; k <= pixels.size(); ++k) {
    left += pixels[k - 1];
    const double imbalance = std::abs(left - (total - left));
    if (imbalance < best) {
      best = imbalance;
      out.split_index = k;
    }
  }
  return out;
}

/// Gaussian beam profile binned into pixel means that sum to total_mean.
inline std::vector<double> gaussian_pixel_means(std::size_t pixels, double total_mean) {
  if (pixels < 2) throw std::domain_error("gaussian_pixel_means: need >= 2 pixels");
  std::vector<double> w(pixels);
  const double center = (static_cast<double>(pixels) - 1.0) / 2.0;
  const double sigma = static_cast<double>(pixels) / 6.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < pixels; ++i) {
    const double x = (static_cast<double>(i) - center) / sigma;
    w[i] = std::exp(-0.5 * x * x);
    sum += w[i];
  }
  for (double& v : w) v *= total_mean / sum;
  return w;
}

/// Shot-noise-limited angular sensitivity of an optical lever.
inline double optical_lever_sensitivity(double flux, double image_width_rad) {
  if (!(flux > 0.0))
    throw std::domain_error("optical_lever_sensitivity: flux must be > 0");
  if (!(image_width_rad > 0.0))
    throw std::domain_error("optical_lever_sensitivity: image width must be > 0");
  return image_width_rad / std::sqrt(flux * 1.0);
}

struct ModelComparison {
  RunResult mode_result{};
  RunResult state_result{};
  double variance_ratio = 0.0;  // larger over smaller
  bool agree = false;
};

inline constexpr double kAgreementRatio = 1.1;

/// Run both models on the same optics and flag whether their difference-signal
/// variances agree. The balanced wavefront-division case is the discriminator:
/// the mode model predicts exactly zero, the state model the full shot noise.
inline ModelComparison compare_models(const Scheme& scheme, const ExperimentConfig& base) {
  ExperimentConfig cfg = base;
  cfg.scheme = scheme;
  ModelComparison cmp;
  cfg.model = Model::ModeFluctuation;
  cmp.mode_result = run_experiment(cfg);
  cfg.model = Model::StateReduction;
  cmp.state_result = run_experiment(cfg);

  const double v1 = cmp.mode_result.empirical_variance;
  const double v2 = cmp.state_result.empirical_variance;
  const double lo = std::min(v1, v2);
  const double hi = std::max(v1, v2);
  if (hi <= 0.0) {
    cmp.variance_ratio = 1.0;
    cmp.agree = true;
  } else {
    cmp.variance_ratio = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    cmp.agree = cmp.variance_ratio <= kAgreementRatio;
  }
  return cmp;
}

}  // namespace qnoise::experiments
