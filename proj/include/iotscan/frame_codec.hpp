#pragma once

#include "iotscan/channel_plan.hpp"

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace iotscan {

using Bytes = std::vector<std::uint8_t>;

/** \brief A protocol-tagged, fully serialized frame as it appears on air. */
struct Frame
{
  Protocol protocol = Protocol::Zigbee;
  Bytes bytes;

  bool operator== (const Frame&) const = default;
};

// ---------------------------------------------------------------------------
// Device identities used for enumeration and de-duplication.

struct ZigbeeShort
{
  std::uint16_t pan_id = 0;
  std::uint16_t addr = 0;
  auto operator<=> (const ZigbeeShort&) const = default;
};

struct ZigbeeExtended
{
  std::uint64_t addr = 0;
  auto operator<=> (const ZigbeeExtended&) const = default;
};

struct BleAdvA
{
  std::uint64_t addr = 0; ///< 48 significant bits
  auto operator<=> (const BleAdvA&) const = default;
};

struct LoRaId
{
  std::uint16_t sync_word = 0;
  std::uint8_t id = 0;
  auto operator<=> (const LoRaId&) const = default;
};

struct ZWaveId
{
  std::uint32_t home_id = 0;
  std::uint8_t source_id = 0;
  auto operator<=> (const ZWaveId&) const = default;
};

/// monostate is "no source identity" (beacon requests, acknowledgements).
using DeviceAddress = std::variant<std::monostate, ZigbeeShort, ZigbeeExtended, BleAdvA, LoRaId, ZWaveId>;

bool has_identity (const DeviceAddress& address);

/// "zigbee-short 1a2b:0003", "zigbee-ext 00124b0001020304", "ble 66:55:44:33:22:11",
/// "lora 1324:42", "zwave c0ffee01:05" or "none".
std::string to_string (const DeviceAddress& address);

/// Inverse of to_string for the identity forms; throws DomainError on bad text.
DeviceAddress parse_device_address (std::string_view kind, std::string_view value);

/// Protocol an identity belongs to; nullopt for monostate.
std::optional<Protocol> address_protocol (const DeviceAddress& address);

// ---------------------------------------------------------------------------
// Structured frames.

enum class ZigbeeFrameType : std::uint8_t
{
  Beacon = 0,
  Data = 1,
  MacCommand = 3,
};

constexpr std::uint8_t kZigbeeBeaconRequest = 0x07;

struct ZigbeeShortAddress
{
  std::uint16_t value = 0;
  bool operator== (const ZigbeeShortAddress&) const = default;
};

struct ZigbeeExtendedAddress
{
  std::uint64_t value = 0;
  bool operator== (const ZigbeeExtendedAddress&) const = default;
};

struct ZigbeeDestination
{
  std::uint16_t pan_id = 0;
  std::uint16_t addr = 0;
  bool operator== (const ZigbeeDestination&) const = default;
};

struct ZigbeeSource
{
  std::uint16_t pan_id = 0;
  std::variant<ZigbeeShortAddress, ZigbeeExtendedAddress> addr;
  bool operator== (const ZigbeeSource&) const = default;
};

/**
 * \brief Simplified IEEE 802.15.4 MAC frame.
 *
 * Only the frame type and the two addressing modes of the frame control field
 * are populated; every other FCF bit is zero. `fcs` is empty until the frame
 * is sealed or decoded.
 */
struct ZigbeeFrame
{
  ZigbeeFrameType type = ZigbeeFrameType::Data;
  std::uint8_t seq = 0;
  std::optional<ZigbeeDestination> dest;
  std::optional<ZigbeeSource> src;
  Bytes payload;
  std::optional<std::uint16_t> fcs;

  bool operator== (const ZigbeeFrame&) const = default;

  static ZigbeeFrame beacon_request (std::uint8_t seq);
};

constexpr std::uint32_t kBleAdvertisingAccessAddress = 0x8E89BED6u;
constexpr std::size_t kBleMaxAdvData = 31;

enum class BlePduType : std::uint8_t
{
  AdvInd = 0x0,
  AdvNonconnInd = 0x2,
  AdvScanInd = 0x6,
};

struct BleAdvPdu
{
  BlePduType type = BlePduType::AdvNonconnInd;
  std::uint64_t adv_a = 0; ///< 48 significant bits
  Bytes adv_data;
  std::optional<std::uint32_t> crc;

  bool operator== (const BleAdvPdu&) const = default;
};

struct LoRaFrame
{
  std::uint16_t sync_word = 0;
  Bytes payload; ///< at least 4 bytes

  bool operator== (const LoRaFrame&) const = default;
};

enum class ZWaveCheck : std::uint8_t
{
  Xor8,  ///< R1 / R2
  Crc16, ///< R3
};

struct ZWaveFrame
{
  ZWaveCheck check_kind = ZWaveCheck::Xor8;
  std::uint32_t home_id = 0;
  std::uint8_t source_id = 0;
  std::uint16_t frame_control = 0;
  std::uint8_t dest_id = 0;
  Bytes payload;
  std::optional<std::uint16_t> check;

  bool operator== (const ZWaveFrame&) const = default;

  /// Value of the length byte: the whole MPDU including the check field.
  std::size_t mpdu_length () const;
};

using DecodedFrame = std::variant<ZigbeeFrame, BleAdvPdu, LoRaFrame, ZWaveFrame>;

Protocol protocol_of (const DecodedFrame& frame);

struct DecodeOptions
{
  /// Unset: try the XOR check first, then CRC-16.
  std::optional<ZWaveCheck> zwave_check;
};

struct AddressOptions
{
  /// Payload byte index that carries the LoRa device id.
  std::size_t lora_id_index = 2;
};

/// The check kind a Z-Wave channel uses: CRC-16 for R3, XOR otherwise.
ZWaveCheck zwave_check_for (const Channel& channel);

/**
 * \brief Serializes a structured frame.
 *
 * An empty check field is computed; a present one must match the body.
 * Throws FrameError{Encode} when the frame violates its type invariants.
 */
Frame encode (const DecodedFrame& frame);

/// Fills in the check field of a structured frame.
DecodedFrame seal (DecodedFrame frame);

/**
 * \brief Parses and validates a serialized frame.
 *
 * Throws FrameError{Truncated | Checksum | Unsupported}.
 */
DecodedFrame decode (Protocol protocol, std::span<const std::uint8_t> bytes, const DecodeOptions& options = {});

DeviceAddress extract_address (const DecodedFrame& frame, const AddressOptions& options = {});

/// Multi-line human-readable dump of a decoded frame.
std::string describe (const DecodedFrame& frame);

std::string to_hex (std::span<const std::uint8_t> bytes);
/// Throws ParameterError on odd length or a non-hex digit.
Bytes from_hex (std::string_view hex);

} // namespace iotscan
