#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fwus/config.hpp"
#include "fwus/wakeup.hpp"

namespace fwus {

enum class Experiment { kTable5, kTable6, kDelayFig9, kPowerFig8, kDynamicFig10, kTrainOnly };

std::string_view to_string(Experiment e) noexcept;
Experiment experiment_from_string(std::string_view name);

struct ReportRow {
  std::string scenario;
  SchemeKind scheme = SchemeKind::kWus;
  double mean_power_mw = 0.0;
  double power_std = 0.0;
  double mean_delay_tti = 0.0;
  double delay_std = 0.0;
  double eta_vs_wus = 0.0;  // NaN when not applicable
  double eta_vs_drx = 0.0;
  double p_md = 0.0;
  double p_f = 0.0;
  int runs = 0;
  std::uint64_t seed = 0;
};

// A reproduced quantity against its expected band.
struct BandCheck {
  std::string name;
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  bool pass = false;
};

struct ExperimentOutcome {
  std::vector<ReportRow> rows;
  std::vector<BandCheck> checks;

  bool all_pass() const noexcept;
};

// Runs the experiment and writes report.csv, curves/*.csv, effective_config.yaml
// and summary.json into cfg.output_dir.
ExperimentOutcome run_experiment(const ScenarioConfig& cfg, Experiment experiment,
                                 std::span<const SchemeKind> schemes);

void write_report_csv(std::span<const ReportRow> rows, std::ostream& out);

}  // namespace fwus
