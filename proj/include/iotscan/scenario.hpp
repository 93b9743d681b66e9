#pragma once

#include "iotscan/channel_plan.hpp"
#include "iotscan/radio_sim.hpp"
#include "iotscan/scanner.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace iotscan {

enum class Algorithm : std::uint8_t
{
  Passive,
  Active,
  Multiprotocol,
  ActiveMultiprotocol,
  Sequential, ///< passive phases one after the other, e.g. BLE then Zigbee
};

std::string_view to_string (Algorithm algorithm);
std::optional<Algorithm> parse_algorithm (std::string_view name);

/** \brief Everything needed to run M trials of one scanning algorithm. */
struct ScenarioConfig
{
  std::string name = "unnamed";
  std::vector<DeviceSpec> devices;
  SdrConfig sdr;
  ScanParams params;
  Algorithm algorithm = Algorithm::Passive;
  ChannelList channels;
  ChannelList probe_channels;
  std::vector<ChannelList> phases;
  std::size_t trials = 10;
  double alpha = 0.05;
  std::uint64_t seed = 1;
  double loss_prob = 0.0;
  double probe_response_delay_max_s = 0.1;
  AddressOptions address_options;
  double delta_t_s = 0.1;
  double max_multi_arrival = 0.01;
  /// Device rates are multiplied by this factor (mean inter-arrivals divided).
  double time_scale = 1.0;
  /// End a trial as soon as every device has been seen.
  bool stop_when_complete = true;
  /// Labels defined or overridden by the scenario itself.
  std::map<std::string, Channel> channel_defs;
};

struct Diagnostic
{
  std::string field_path;
  std::string message;
};

/**
 * Parses the line-oriented scenario format (see docs/scenario-format.md).
 * `include` paths are resolved against `baseDir`. Throws ScenarioError with a
 * "file:line" prefix on syntax errors.
 */
ScenarioConfig parse_scenario (std::istream& is, const std::filesystem::path& baseDir = ".",
                               const std::string& sourceName = "<input>");
ScenarioConfig load_scenario (const std::filesystem::path& path);

/**
 * Throws ScenarioError (field path such as "devices[3].channels") for
 * invalid configurations; returns warnings, e.g. for devices that sit on no
 * scanned channel and so can never be discovered.
 */
std::vector<Diagnostic> validate (const ScenarioConfig& config);

/// The radio half of the config, with time_scale applied.
RadioScenario radio_scenario (const ScenarioConfig& config);

/// Stable text rendering of every field; hashed into the run manifest.
std::string canonical_text (const ScenarioConfig& config);

/// FNV-1a, 64 bit.
std::uint64_t fnv1a64 (std::string_view text);

} // namespace iotscan
