#pragma once

#include "iotscan/analytics.hpp"
#include "iotscan/frame_codec.hpp"
#include "iotscan/scenario.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace iotscan {

struct TrialResult
{
  /// Indexed like ScenarioConfig::devices; nullopt if never seen.
  TrialTimes first_seen;
  /// Simulated seconds the scan actually ran.
  double scan_duration_s = 0.0;
};

struct ExperimentResult
{
  std::vector<TrialResult> trials;
  OrderStatSummary summary;
  double wall_clock_s = 0.0;
};

struct RunOptions
{
  /// Worker threads for trials; 0 picks hardware_concurrency.
  unsigned threads = 0;
  /// Record the radio events of this trial (written by write_event_log_csv).
  std::optional<std::size_t> event_log_trial;
  std::vector<Emission>* event_log = nullptr;
};

/**
 * Runs config.trials independent trials; trial m uses the environment seed
 * derive_seed(config.seed, m). Results are stored in trial order regardless of
 * scheduling. Throws ScenarioError on invalid configs.
 */
ExperimentResult run_experiment (const ScenarioConfig& config, const RunOptions& options = {});

/// One trial on a caller-owned environment.
TrialResult run_trial (const ScenarioConfig& config, Environment& env);

struct ModelTable
{
  std::vector<double> expected_s;
  /// Fraction-of-time divisor C_i per device.
  std::vector<double> channel_divisors;
  double delta_t_s = kDefaultDeltaT;
};

/**
 * Expected order statistics for the scenario's devices. C_i is the number of
 * slots in the scan cycle (channels, groups, or responding channels) over the
 * number of slots in which device i is audible. Throws ModelError{Unsupported}
 * for sequential scans and ModelError{Degenerate} for inaudible devices.
 */
ModelTable run_model (const ScenarioConfig& config, std::optional<double> deltaT = std::nullopt);

struct CompareRow
{
  OrderStatRow empirical;
  double expected_s = 0.0;
  bool in_ci = false;
};

struct CompareReport
{
  std::vector<CompareRow> rows;
  std::size_t in_ci_count = 0;
  bool passed = true;
};

constexpr double kCompareAcceptFraction = 0.75;

/// Model value inside the t interval for at least 75% of the rows; censored rows count as misses.
CompareReport compare (const OrderStatSummary& summary, const ModelTable& model);

/// Decoded frame and extracted address as text. Codec errors propagate.
std::string dissect (Protocol protocol, std::string_view hex, const DecodeOptions& options = {},
                     const AddressOptions& addressOptions = {});

void write_trials_csv (std::ostream& os, const ScenarioConfig& config, const ExperimentResult& result);
void write_summary_csv (std::ostream& os, const OrderStatSummary& summary);
void write_model_csv (std::ostream& os, const ModelTable& model);
void write_compare_csv (std::ostream& os, const CompareReport& report);
void write_manifest (std::ostream& os, const ScenarioConfig& config, const std::string& command);

/// "%.6f", with "nan" for undefined values.
std::string format_value (double v);

std::string version_string ();

} // namespace iotscan
