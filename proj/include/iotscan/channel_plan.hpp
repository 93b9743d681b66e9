#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace iotscan {

/// Frequencies are integer Hz so every channel in the plans below is exact.
using Hz = std::int64_t;

constexpr Hz kKHz = 1'000;
constexpr Hz kMHz = 1'000'000;

enum class Protocol : std::uint8_t
{
  Zigbee,
  BleAdvertising,
  LoRa,
  ZWave,
};

std::string_view to_string (Protocol protocol);

/// Accepts "zigbee", "ble", "lora", "zwave" (case-insensitive).
std::optional<Protocol> parse_protocol (std::string_view name);

/**
 * \brief A radio channel: center frequency, occupied bandwidth and protocol.
 *
 * Labels are protocol-native names ("zigbee-11", "ble-37", "zwave-r2",
 * "lora-ul-35") and are unique within a protocol.
 */
struct Channel
{
  Hz center_hz = 0;
  Hz bandwidth_hz = 0;
  Protocol protocol = Protocol::Zigbee;
  std::string label;

  /// Validating constructor; throws DomainError on bandwidth <= 0 or empty label.
  static Channel make (Hz centerHz, Hz bandwidthHz, Protocol protocol, std::string label);

  // Edges are split so that upper - lower == bandwidth for odd widths too.
  Hz lower_edge_hz () const { return center_hz - bandwidth_hz / 2; }
  Hz upper_edge_hz () const { return center_hz + (bandwidth_hz - bandwidth_hz / 2); }

  bool operator== (const Channel&) const = default;
};

/// Orders by center frequency, then protocol, then label.
bool frequency_less (const Channel& a, const Channel& b);

using ChannelList = std::vector<Channel>;

bool is_ascending (const ChannelList& channels);
void sort_ascending (ChannelList& channels);

Channel zigbee_channel (int k);
ChannelList zigbee_channels ();
ChannelList ble_advertising_channels ();
Channel ble_rf_channel (int k);
Channel lora_uplink_channel (int k);
Channel lora_downlink_channel (int k);
/// R2 (908.4 MHz / 40 kHz) and R3 (916 MHz / 100 kHz).
ChannelList zwave_channels ();
/// R1 shares 908.4 MHz with R2 at 9.6 kbps; not part of the default list.
Channel zwave_r1_channel ();
/// YoLink uplink 910.29 MHz and downlink 923.29 MHz, both 125 kHz.
ChannelList yolink_lora_channels ();

/**
 * \brief Resolves a single channel label.
 *
 * Known forms: zigbee-<11..26>, ble-<37..39>, ble-rf-<0..39>, lora-ul-<0..71>,
 * lora-dl-<0..7>, zwave-r1, zwave-r2, zwave-r3, yolink-ul, yolink-dl.
 * Returns nullopt for anything else.
 */
std::optional<Channel> channel_by_label (std::string_view label);

/**
 * \brief Expands a label or an inclusive numeric range such as
 * "zigbee-11..26" into channels, in label order.
 *
 * Throws DomainError for unknown labels or out-of-range indices.
 */
ChannelList expand_channel_spec (std::string_view spec);

} // namespace iotscan
