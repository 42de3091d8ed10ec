#include <cmath>
#include <vector>

#include <catch_amalgamated.hpp>

#include "qnoise/mode_model.hpp"

using namespace qnoise;
using namespace qnoise::mode_model;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::pair<double, double> sample_stats(const std::vector<double>& xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, ss / static_cast<double>(xs.size() - 1)};
}

std::vector<double> draw_delta_n(const Scheme& scheme, const ModeState& a,
                                 const ModeState& b, std::size_t n,
                                 std::uint64_t seed = 1) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    RngStream rng(seed, i);
    out[i] = mc_delta_n(scheme, a, b, rng);
  }
  return out;
}

}  // namespace

TEST_CASE("degenerate fluctuations collapse to zero") {
  ModeState m(1.0, 0.0, 0.0);
  for (std::uint64_t i = 0; i < 100; ++i) {
    RngStream rng(3, i);
    FluctuationSample f = sample_fluctuations(m, rng);
    CHECK(f.d1 == 0.0);
    CHECK(f.d2 == 0.0);
  }
}

TEST_CASE("fluctuation draws have the configured variance") {
  ModeState m = ModeState::vacuum();
  const std::size_t n = 1'000'000;
  std::vector<double> d1(n);
  for (std::size_t i = 0; i < n; ++i) {
    RngStream rng(11, i);
    d1[i] = sample_fluctuations(m, rng).d1;
  }
  auto [mean, var] = sample_stats(d1);
  CHECK_THAT(mean, WithinAbs(0.0, 3.0 * 0.5 / std::sqrt(double(n))));
  CHECK(var > 0.2485);
  CHECK(var < 0.2515);
}

TEST_CASE("squeezing by ln 2 quarters the sampled variance") {
  ModeState m(0.0, 0.5, 0.5, std::log(2.0), 1);
  const std::size_t n = 1'000'000;
  std::vector<double> d1(n);
  for (std::size_t i = 0; i < n; ++i) {
    RngStream rng(12, i);
    d1[i] = sample_fluctuations(m, rng).d1;
  }
  auto [mean, var] = sample_stats(d1);
  CHECK_THAT(var, WithinRel(0.0625, 0.01));
}

TEST_CASE("symmetric splitter on a single input") {
  auto [c, d] = beamsplitter_transform({1.0, 0.0}, {0.0, 0.0}, SplitterSpec::symmetric());
  CHECK_THAT(c.re, WithinRel(1.0 / std::numbers::sqrt2, 1e-15));
  CHECK_THAT(d.re, WithinRel(1.0 / std::numbers::sqrt2, 1e-15));
  CHECK(c.im == 0.0);
  CHECK(d.im == 0.0);
}

TEST_CASE("equal inputs interfere constructively and destructively") {
  auto [c, d] = beamsplitter_transform({1.0, 0.0}, {1.0, 0.0}, SplitterSpec::symmetric());
  CHECK_THAT(c.re, WithinRel(std::numbers::sqrt2, 1e-15));
  CHECK_THAT(d.re, WithinAbs(0.0, 1e-15));
}

TEST_CASE("splitter conserves intensity for arbitrary inputs") {
  RngStream rng(21, 0);
  for (int trial = 0; trial < 500; ++trial) {
    FieldAmplitude a{rng.normal() * 10.0, rng.normal() * 10.0};
    FieldAmplitude b{rng.normal() * 10.0, rng.normal() * 10.0};
    SplitterSpec bs = SplitterSpec::from_reflectance(rng.uniform());
    auto [c, d] = beamsplitter_transform(a, b, bs);
    const double in = detect(a) + detect(b);
    const double out = detect(c) + detect(d);
    CHECK_THAT(out, WithinRel(in, 1e-9));
  }
}

TEST_CASE("square-law detection") {
  CHECK(detect({0.0, 0.0}) == 0.0);
  CHECK(detect({3.0, 4.0}) == 25.0);
  CHECK(detect({1000.5, 0.0}) == 1001000.25);
}

TEST_CASE("balanced wavefront division cancels every sample exactly") {
  ModeState a = ModeState::coherent(1000.0);
  for (std::uint64_t seed : {0ull, 1ull, 42ull, 987654321ull}) {
    for (std::uint64_t i = 0; i < 1000; ++i) {
      RngStream rng(seed, i);
      CHECK(mc_delta_n(Scheme::bwdd(), a, ModeState::vacuum(), rng) == 0.0);
    }
  }
}

TEST_CASE("homodyne difference variance equals the mean photon number") {
  ModeState a = ModeState::coherent(1000.0);  // N = 1e6
  auto deltas = draw_delta_n(Scheme::bhd(), a, ModeState::vacuum(), 100'000);
  auto [mean, var] = sample_stats(deltas);
  CHECK_THAT(var, WithinRel(1e6, 0.05));
}

TEST_CASE("independent half-wavefront fluctuations give half the homodyne variance") {
  ModeState a = ModeState::coherent(1000.0);
  auto deltas = draw_delta_n(Scheme::bwdd_independent(), a, ModeState::vacuum(), 100'000);
  auto [mean, var] = sample_stats(deltas);
  CHECK_THAT(var, WithinRel(5e5, 0.05));
}

TEST_CASE("steering mirror reflection sign changes no sample") {
  SplitterSpec mirror = SplitterSpec::from_reflectance(0.99);
  ModeState a = ModeState::coherent(1000.0);
  ModeState b = ModeState::vacuum();
  for (std::uint64_t i = 0; i < 1000; ++i) {
    RngStream rng1(5, i), rng2(5, i);
    FieldAmplitude full1 = sample_field(a, rng1);
    FieldAmplitude full2 = sample_field(a, rng2);
    FieldAmplitude half1{full1.re / std::numbers::sqrt2, full1.im / std::numbers::sqrt2};
    FieldAmplitude half2{full2.re / std::numbers::sqrt2, full2.im / std::numbers::sqrt2};
    FluctuationSample leak1 = sample_fluctuations(b, rng1);
    FluctuationSample leak2 = sample_fluctuations(b, rng2);
    const double with_pi =
        detect(mirror_output_field(half1, {leak1.d1, leak1.d2}, mirror, -1.0));
    const double without =
        detect(mirror_output_field(half2, {leak2.d1, leak2.d2}, mirror, 1.0));
    CHECK(with_pi == without);
  }
}

TEST_CASE("closed-form variances match the leading-order expressions") {
  ModeState vac = ModeState::vacuum();

  SECTION("direct detection is shot-noise limited") {
    ModeState a = ModeState::coherent(100.0);  // N = 1e4
    auto pred = analytic_variance(Scheme::direct(), a, vac);
    CHECK(pred.mean == 1e4);
    CHECK_THAT(pred.variance, WithinRel(1e4, 1e-12));
  }

  SECTION("mirror vacuum leak is the homodyne variance suppressed by T/2") {
    ModeState a = ModeState::coherent(1000.0);
    SplitterSpec mirror = SplitterSpec::from_reflectance(0.99);
    auto pred = analytic_variance(Scheme::mirror_bwdd(mirror), a, vac);
    const double leak = 2.0 * 0.99 * 0.01 * 1e6 * 0.25;
    CHECK_THAT(leak, WithinRel(4950.0, 1e-12));
    CHECK_THAT(pred.variance, WithinRel(4950.0 + 25.0, 1e-12));
    CHECK_THAT(pred.mean, WithinRel(0.5 * 0.01 * 1e6, 1e-12));
  }

  SECTION("squeezed open port scales the homodyne variance by exp(-2s)") {
    ModeState a = ModeState::coherent(1000.0);
    ModeState b(0.0, 0.5, 0.5, std::log(2.0), 1);
    auto pred = analytic_variance(Scheme::bhd(), a, b);
    CHECK_THAT(pred.variance, WithinRel(2.5e5, 1e-12));
  }
}

TEST_CASE("imbalanced wavefront division leaves the residual (P-Q) signal") {
  ModeState a = ModeState::coherent(1000.0);
  auto pred = analytic_variance(Scheme::bwdd(0.51), a, ModeState::vacuum());
  CHECK_THAT(pred.mean, WithinRel(2e4, 1e-10));
  CHECK_THAT(pred.variance, WithinRel(400.0, 1e-10));
}

TEST_CASE("per-detector homodyne variances and their covariance") {
  ModeState a = ModeState::coherent(1000.0);

  SECTION("unsqueezed: sums equal the difference variance") {
    auto v = detector_variances_bhd(a, ModeState::vacuum());
    auto pred = analytic_variance(Scheme::bhd(), a, ModeState::vacuum());
    CHECK(v.cov == 0.0);
    CHECK_THAT(v.vc + v.vd, WithinRel(pred.variance, 1e-12));
    CHECK_THAT(v.vc + v.vd, WithinRel(1e6, 1e-12));
  }

  SECTION("squeezed open port splits the two totals") {
    ModeState b(0.0, 0.5, 0.5, std::log(2.0), 1);
    auto v = detector_variances_bhd(a, b);
    CHECK_THAT(v.vc + v.vd, WithinRel(2.0 * (2.5e5 + 6.25e4), 1e-12));
    auto pred = analytic_variance(Scheme::bhd(), a, b);
    CHECK_THAT(pred.variance, WithinRel(2.5e5, 1e-12));
  }

  SECTION("no fluctuations, no variance") {
    ModeState quiet_a(1000.0, 0.0, 0.0);
    ModeState quiet_b(0.0, 0.0, 0.0);
    auto v = detector_variances_bhd(quiet_a, quiet_b);
    CHECK(v.vc == 0.0);
    CHECK(v.vd == 0.0);
    CHECK(v.cov == 0.0);
  }

  SECTION("V(dN) = Vc + Vd - 2 Cov for all squeeze values") {
    for (double s : {-1.0, -0.3, 0.0, 0.2, 0.7, 1.5}) {
      ModeState b(0.0, 0.5, 0.5, s, 1);
      auto v = detector_variances_bhd(a, b);
      auto pred = analytic_variance(Scheme::bhd(), a, b);
      CHECK_THAT(v.vc + v.vd - 2.0 * v.cov, WithinRel(pred.variance, 1e-12));
    }
  }
}

TEST_CASE("zero squeeze matches the unsqueezed closed forms exactly") {
  ModeState a = ModeState::coherent(123.0);
  ModeState b_plain = ModeState::vacuum();
  ModeState b_zero_squeeze(0.0, 0.5, 0.5, 0.0, 1);
  for (const Scheme& scheme : {Scheme::bhd(), Scheme::michelson_anchored()}) {
    auto p0 = analytic_variance(scheme, a, b_plain);
    auto p1 = analytic_variance(scheme, a, b_zero_squeeze);
    CHECK(p0.mean == p1.mean);
    CHECK(p0.variance == p1.variance);
  }
}

TEST_CASE("anchored Michelson carries half the free-mirror variance") {
  ModeState a = ModeState::coherent(777.0);
  auto anchored = analytic_variance(Scheme::michelson_anchored(), a, ModeState::vacuum());
  auto free_mirror = analytic_variance(Scheme::michelson_free(), a, ModeState::vacuum());
  CHECK(anchored.variance == 0.5 * free_mirror.variance);
}

TEST_CASE("sampled variance tracks the closed form for every scheme") {
  ModeState a = ModeState::coherent(1000.0);
  ModeState vac = ModeState::vacuum();
  const std::size_t n = 100'000;
  const Scheme schemes[] = {
      Scheme::direct(),       Scheme::bhd(),
      Scheme::bwdd(0.51),     Scheme::bwdd_independent(),
      Scheme::mirror_bwdd(SplitterSpec::from_reflectance(0.9)),
      Scheme::michelson_anchored()};
  for (const Scheme& scheme : schemes) {
    auto pred = analytic_variance(scheme, a, vac);
    auto deltas = draw_delta_n(scheme, a, vac, n, 77);
    auto [mean, var] = sample_stats(deltas);
    const double stderr_v = pred.variance * std::sqrt(2.0 / double(n));
    INFO("scheme " << to_string(scheme.kind));
    CHECK_THAT(var, WithinAbs(pred.variance, 4.0 * stderr_v + 1.0));
  }
}
