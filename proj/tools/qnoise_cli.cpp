#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "qnoise/config.hpp"
#include "qnoise/core.hpp"
#include "qnoise/experiments.hpp"
#include "qnoise/report.hpp"

namespace {

using namespace qnoise;

struct CommonOpts {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> samples;
  std::optional<unsigned> threads;
  bool lenient = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "experiment config file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", opts.out_dir, "output directory for report files");
  cmd->add_option("--seed", opts.seed, "override the config seed");
  cmd->add_option("--samples", opts.samples, "override the config sample count");
  cmd->add_option("--threads", opts.threads,
                  "worker threads (does not change results)");
  cmd->add_flag("--lenient", opts.lenient, "warn on unknown config keys");
}

config::ParsedConfig load(const CommonOpts& opts) {
  std::ifstream in(opts.config_path, std::ios::binary);
  std::ostringstream text;
  text << in.rdbuf();
  auto parsed = config::parse_config(text.str(), opts.lenient);
  for (const auto& w : parsed.warnings) std::cerr << "warning: " << w << "\n";
  if (opts.seed) parsed.cfg.seed = *opts.seed;
  if (opts.samples) {
    if (*opts.samples < 100)
      throw std::invalid_argument("--samples must be at least 100");
    parsed.cfg.samples = *opts.samples;
  }
  if (opts.threads) {
    if (*opts.threads == 0) throw std::invalid_argument("--threads must be >= 1");
    parsed.cfg.threads = static_cast<unsigned>(*opts.threads);
  }
  return parsed;
}

report::ReportRow make_row(const ExperimentConfig& cfg, const RunResult& result) {
  return {cfg.power_watts, to_string(cfg.scheme.kind), to_string(cfg.model), result};
}

void sort_rows(std::vector<report::ReportRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (a.power_watts != b.power_watts) return a.power_watts < b.power_watts;
    return a.model < b.model;
  });
}

int cmd_run(const CommonOpts& opts) {
  auto parsed = load(opts);
  report::ReportDocument doc;
  doc.seed = parsed.cfg.seed;
  doc.config_echo = report::echo_config(parsed.cfg);
  doc.rows.push_back(make_row(parsed.cfg, experiments::run_experiment(parsed.cfg)));
  report::emit_report(doc, opts.out_dir);
  std::cout << report::csv_text(doc);
  return 0;
}

int cmd_sweep(const CommonOpts& opts, bool both_models) {
  auto parsed = load(opts);
  if (parsed.sweep_powers.size() < 3)
    throw std::invalid_argument(
        "sweep needs a [sweep] powers list with at least 3 entries");
  report::ReportDocument doc;
  doc.seed = parsed.cfg.seed;
  doc.config_echo = report::echo_config(parsed.cfg, parsed.sweep_powers);

  std::vector<Model> models{parsed.cfg.model};
  if (both_models)
    models = {Model::ModeFluctuation, Model::StateReduction};
  for (Model model : models) {
    auto table = experiments::power_sweep(parsed.cfg.scheme, model,
                                          parsed.sweep_powers, parsed.cfg);
    for (const auto& row : table.rows) {
      ExperimentConfig cfg = parsed.cfg;
      cfg.model = model;
      cfg.power_watts = row.power_watts;
      doc.rows.push_back(make_row(cfg, row.result));
    }
    doc.fits.push_back({table.slope, table.intercept, table.slope_stderr,
                        table.intercept_stderr, table.pearson_r});
  }
  sort_rows(doc.rows);
  report::emit_report(doc, opts.out_dir);
  std::cout << report::csv_text(doc);
  return 0;
}

int cmd_compare(const CommonOpts& opts) {
  auto parsed = load(opts);
  auto cmp = experiments::compare_models(parsed.cfg.scheme, parsed.cfg);
  report::ReportDocument doc;
  doc.seed = parsed.cfg.seed;
  doc.config_echo = report::echo_config(parsed.cfg);
  ExperimentConfig cfg = parsed.cfg;
  cfg.model = Model::ModeFluctuation;
  doc.rows.push_back(make_row(cfg, cmp.mode_result));
  cfg.model = Model::StateReduction;
  doc.rows.push_back(make_row(cfg, cmp.state_result));
  sort_rows(doc.rows);
  doc.verdicts.push_back({cmp.agree, cmp.variance_ratio,
                          cmp.mode_result.empirical_variance,
                          cmp.state_result.empirical_variance});
  report::emit_report(doc, opts.out_dir);

  std::cout << "scheme " << to_string(parsed.cfg.scheme.kind) << ": "
            << (cmp.agree ? "models agree" : "models disagree")
            << " (mode variance " << report::format_real(cmp.mode_result.empirical_variance)
            << ", state variance "
            << report::format_real(cmp.state_result.empirical_variance) << ")\n";
  return 0;
}

int cmd_schemes() {
  std::cout << "direct               single detector, no parameters\n"
            << "bhd                  balanced homodyne, 50:50 splitter\n"
            << "bwdd                 balanced wavefront division; [scheme] p = P (Q = 1-P)\n"
            << "bwdd-independent     wavefront halves with independent fluctuations\n"
            << "mirror-bwdd          steering mirror in one half; [scheme] reflectance = R\n"
            << "michelson-free       free-mirror Michelson (homodyne statistics)\n"
            << "michelson-anchored   one mirror anchored; [scheme] quadrature = 1|2\n"
            << "centroid             pixel-split difference; [scheme] pixels = N\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Balanced differential detection quantum-noise simulator"};
  app.require_subcommand(1);

  CommonOpts run_opts, sweep_opts, compare_opts;
  bool both_models = false;

  CLI::App* run = app.add_subcommand("run", "run a single experiment");
  add_common(run, run_opts);
  CLI::App* sweep = app.add_subcommand("sweep", "run a power sweep");
  add_common(sweep, sweep_opts);
  sweep->add_flag("--both", both_models, "sweep both models");
  CLI::App* compare = app.add_subcommand("compare", "compare the two models");
  add_common(compare, compare_opts);
  app.add_subcommand("schemes", "list supported schemes and their parameters");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_opts);
    if (sweep->parsed()) return cmd_sweep(sweep_opts, both_models);
    if (compare->parsed()) return cmd_compare(compare_opts);
    return cmd_schemes();
  } catch (const qnoise::config::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
