#include "iotscan/checksum.hpp"

namespace iotscan::checksum {

std::uint16_t
crc16_802154 (std::span<const std::uint8_t> data)
{
  // 0x8408 is 0x1021 bit-reversed.
  std::uint16_t crc = 0x0000;
  for (std::uint8_t byte : data)
    {
      crc ^= byte;
      for (int bit = 0; bit < 8; ++bit)
        {
          crc = (crc & 1u) ? static_cast<std::uint16_t> ((crc >> 1) ^ 0x8408u)
                           : static_cast<std::uint16_t> (crc >> 1);
        }
    }
  return crc;
}

std::uint32_t
crc24_ble (std::span<const std::uint8_t> data, std::uint32_t init)
{
  // Run the reflected register: poly 0x00065B reversed over 24 bits is 0xDA6000.
  std::uint32_t reg = 0;
  for (int i = 0; i < 24; ++i)
    {
      if (init & (1u << i))
        {
          reg |= 1u << (23 - i);
        }
    }
  for (std::uint8_t byte : data)
    {
      reg ^= byte;
      for (int bit = 0; bit < 8; ++bit)
        {
          reg = (reg & 1u) ? (reg >> 1) ^ 0xDA6000u : reg >> 1;
        }
    }
  return reg & 0xFFFFFFu;
}

std::uint8_t
zwave_xor8 (std::span<const std::uint8_t> data)
{
  std::uint8_t check = 0xFF;
  for (std::uint8_t byte : data)
    {
      check ^= byte;
    }
  return check;
}

std::uint16_t
zwave_crc16 (std::span<const std::uint8_t> data)
{
  std::uint16_t crc = 0x1D0F;
  for (std::uint8_t byte : data)
    {
      crc ^= static_cast<std::uint16_t> (byte) << 8;
      for (int bit = 0; bit < 8; ++bit)
        {
          crc = (crc & 0x8000u) ? static_cast<std::uint16_t> ((crc << 1) ^ 0x1021u)
                                : static_cast<std::uint16_t> (crc << 1);
        }
    }
  return crc;
}

} // namespace iotscan::checksum
