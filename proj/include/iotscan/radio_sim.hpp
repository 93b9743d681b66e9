#pragma once

#include "iotscan/channel_plan.hpp"
#include "iotscan/frame_codec.hpp"
#include "iotscan/random.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace iotscan {

enum class DeviceRole : std::uint8_t
{
  Coordinator,
  Router,
  EndDevice,
  Gateway,
  Peripheral,
};

std::string_view to_string (DeviceRole role);
std::optional<DeviceRole> parse_role (std::string_view name);

enum class EmitterMode : std::uint8_t
{
  Poisson,  ///< exponential inter-arrivals with mean mean_interarrival_s
  Periodic, ///< fixed period mean_interarrival_s, uniform random phase
};

struct DeviceSpec
{
  std::string name;
  Protocol protocol = Protocol::Zigbee;
  DeviceRole role = DeviceRole::EndDevice;
  ChannelList channels;
  double mean_interarrival_s = 1.0;
  DeviceAddress address;
  std::vector<DeviceAddress> aliases;
  bool responds_to_probe = false;
  EmitterMode mode = EmitterMode::Poisson;
};

/// The radio part of a scenario: everything the environment needs.
struct RadioScenario
{
  std::vector<DeviceSpec> devices;
  double loss_prob = 0.0;
  double probe_response_delay_max_s = 0.1;
  AddressOptions address_options;
};

/// Index of a device within its scenario.
struct DeviceId
{
  std::uint32_t value = 0;
  auto operator<=> (const DeviceId&) const = default;
};

constexpr DeviceId kExternalDevice{0xFFFF'FFFFu};

struct Emission
{
  double time_s = 0.0;
  Channel channel;
  Frame frame;
  DeviceId device;
};

/// Throws ScenarioError with a field path when the device list is inconsistent.
void validate (const RadioScenario& scenario);

/**
 * \brief Discrete-event radio environment.
 *
 * Each device owns its own RNG stream, so the emission sequence is a function
 * of (scenario, seed) alone, independent of how the scanner samples it. Frames
 * are point events: an emission is received iff its timestamp falls inside the
 * listen window and it survives the per-frame loss draw.
 *
 * Single-threaded; one Environment per trial.
 */
class Environment
{
public:
  Environment (RadioScenario scenario, std::uint64_t seed);

  double clock () const { return m_clock; }

  /// Moves the clock forward without listening; throws SimulationError on regression.
  void advance_to (double t);

  /**
   * Delivered emissions on any of `channels` with time in [t0, t1), sorted by
   * time. Advances the clock to t1. Throws SimulationError if t0 < clock or t1 < t0.
   */
  std::vector<Emission> emissions_in (std::span<const Channel> channels, double t0, double t1);
  std::vector<Emission> emissions_in (const Channel& channel, double t0, double t1);

  /**
   * Broadcast probe at time t. Every device on `channel` that answers probes
   * schedules a beacon at t + U(0, probe_response_delay_max_s); the scheduled
   * responses (after loss) are returned and will be delivered by emissions_in.
   * Throws UnsupportedProbe for non-Zigbee channels.
   */
  std::vector<Emission> inject_probe (const Channel& channel, double t);

  /**
   * Queue an arbitrary frame (a replayed capture, a foreign transmitter) for
   * delivery by emissions_in. Use kExternalDevice for frames that belong to no
   * scenario device. Throws SimulationError if e.time_s < clock.
   */
  void inject_emission (Emission e);

  std::optional<DeviceId> resolve (const DeviceAddress& address) const;

  std::size_t device_count () const { return m_devices.size (); }
  const DeviceSpec& device (DeviceId id) const { return m_devices.at (id.value).spec; }
  const RadioScenario& scenario () const { return m_scenario; }

  void set_logging (bool enabled) { m_logging = enabled; }
  const std::vector<Emission>& event_log () const { return m_log; }

private:
  struct SimDevice
  {
    DeviceSpec spec;
    std::mt19937_64 traffic;  ///< inter-arrival draws only
    std::mt19937_64 content;  ///< frame contents and loss draws
    double next_time = 0.0;
    std::uint32_t emitted = 0;
    std::uint8_t beacon_seq = 0;
  };

  void schedule_next (SimDevice& dev);
  Frame make_traffic_frame (const SimDevice& dev, const Channel& channel, std::uint64_t frameSeed) const;
  Frame make_beacon (SimDevice& dev);
  bool lost (SimDevice& dev);
  void record (const std::vector<Emission>& delivered);

  RadioScenario m_scenario;
  std::vector<SimDevice> m_devices;
  std::map<DeviceAddress, DeviceId> m_addressTable;
  std::vector<Emission> m_pending;
  std::mt19937_64 m_probeRng;
  double m_clock = 0.0;
  bool m_logging = true;
  std::vector<Emission> m_log;
};

Environment build_environment (const RadioScenario& scenario, std::uint64_t seed);

/// CSV: time_s,channel_label,protocol,device,frame_hex
void write_event_log_csv (std::ostream& os, const Environment& env);

} // namespace iotscan
