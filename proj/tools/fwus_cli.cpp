#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "fwus/config.hpp"
#include "fwus/error.hpp"
#include "fwus/experiments.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitBandViolation = 2;

std::vector<fwus::SchemeKind> parse_schemes(const std::string& s) {
  if (s == "all") return {fwus::SchemeKind::kDrx, fwus::SchemeKind::kWus, fwus::SchemeKind::kFwus};
  return {fwus::scheme_from_string(s)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Forecasting wake-up signal simulator: runs the power/delay experiments and writes CSV reports"};

  std::string config_path;
  std::string experiment = "table6";
  std::optional<int> runs;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::string out_dir;
  bool check = false;
  std::string scheme = "all";
  bool verbose = false;

  app.add_option("--config", config_path, "YAML configuration file")->check(CLI::ExistingFile);
  app.add_option("--experiment", experiment, "table5 | table6 | delay_fig9 | power_fig8 | dynamic_fig10 | train_only")
      ->capture_default_str();
  app.add_option("--runs", runs, "Monte Carlo runs")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "master seed");
  app.add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", out_dir, "output directory (default: $FWUS_OUT or the config value)");
  app.add_flag("--check", check, "exit with status 2 when a reproduced value falls outside its band");
  app.add_option("--scheme", scheme, "drx | wus | fwus | all")
      ->check(CLI::IsMember({"drx", "wus", "fwus", "all"}))
      ->capture_default_str();
  app.add_flag("-v,--verbose", verbose, "debug logging");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitError;
  }

  try {
    fwus::ScenarioConfig cfg = config_path.empty() ? fwus::parse_config("") : fwus::load_config(config_path);
    if (const char* env = std::getenv("FWUS_OUT"); env && *env) cfg.output_dir = env;
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (runs) cfg.runs = *runs;
    if (seed) cfg.master_seed = *seed;
    if (workers) cfg.workers = *workers;
    if (verbose) cfg.verbose = true;
    cfg.validate();
    spdlog::set_level(cfg.verbose ? spdlog::level::debug : spdlog::level::info);

    const auto outcome = fwus::run_experiment(cfg, fwus::experiment_from_string(experiment), parse_schemes(scheme));
    std::cout << fmt::format("{} rows written to {}\n", outcome.rows.size(), (cfg.output_dir / "report.csv").string());
    for (const auto& c : outcome.checks) {
      std::cout << fmt::format("{} {} = {:.6g} (band [{:.6g}, {:.6g}])\n", c.pass ? "PASS" : "FAIL", c.name, c.value,
                               c.lo, c.hi);
    }
    if (check && !outcome.all_pass()) return kExitBandViolation;
    return kExitOk;
  } catch (const fwus::Error& e) {
    std::cerr << "error [" << fwus::to_string(e.code()) << "]: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
}
