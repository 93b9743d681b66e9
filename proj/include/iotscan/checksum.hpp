#pragma once

#include <cstdint>
#include <span>

namespace iotscan::checksum {

/// IEEE 802.15.4 FCS: CRC-16, poly 0x1021 processed LSB-first, init 0x0000.
std::uint16_t crc16_802154 (std::span<const std::uint8_t> data);

/// BLE link-layer CRC-24, poly 0x00065B LSB-first; init 0x555555 on advertising channels.
std::uint32_t crc24_ble (std::span<const std::uint8_t> data, std::uint32_t init = 0x555555);

/// Z-Wave R1/R2 frame check: 0xFF XOR every preceding byte.
std::uint8_t zwave_xor8 (std::span<const std::uint8_t> data);

/// Z-Wave R3 frame check: CRC-16, poly 0x1021 MSB-first, init 0x1D0F.
std::uint16_t zwave_crc16 (std::span<const std::uint8_t> data);

} // namespace iotscan::checksum
