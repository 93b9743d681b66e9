#include "iotscan/frame_codec.hpp"

#include "iotscan/checksum.hpp"
#include "iotscan/errors.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <sstream>

namespace iotscan {

namespace {

template <typename... Ts>
struct Overloaded : Ts...
{
  using Ts::operator()...;
};
template <typename... Ts>
Overloaded (Ts...) -> Overloaded<Ts...>;

void
put_le (Bytes& out, std::uint64_t value, int width)
{
  for (int i = 0; i < width; ++i)
    {
      out.push_back (static_cast<std::uint8_t> (value >> (8 * i)));
    }
}

void
put_be (Bytes& out, std::uint64_t value, int width)
{
  for (int i = width - 1; i >= 0; --i)
    {
      out.push_back (static_cast<std::uint8_t> (value >> (8 * i)));
    }
}

std::uint64_t
get_le (std::span<const std::uint8_t> in, std::size_t offset, int width)
{
  std::uint64_t value = 0;
  for (int i = 0; i < width; ++i)
    {
      value |= static_cast<std::uint64_t> (in[offset + i]) << (8 * i);
    }
  return value;
}

std::uint64_t
get_be (std::span<const std::uint8_t> in, std::size_t offset, int width)
{
  std::uint64_t value = 0;
  for (int i = 0; i < width; ++i)
    {
      value = (value << 8) | in[offset + i];
    }
  return value;
}

[[noreturn]] void
fail (FrameError::Kind kind, std::size_t offset, const std::string& what)
{
  const char* prefix = "";
  switch (kind)
    {
    case FrameError::Kind::Truncated:
      prefix = "TruncatedFrame";
      break;
    case FrameError::Kind::Checksum:
      prefix = "ChecksumError";
      break;
    case FrameError::Kind::Unsupported:
      prefix = "UnsupportedFrame";
      break;
    case FrameError::Kind::Encode:
      prefix = "EncodeError";
      break;
    }
  throw FrameError (kind, offset, std::string (prefix) + " at byte " + std::to_string (offset) + ": " + what);
}

std::string
hex_n (std::uint64_t value, int digits)
{
  char buf[32];
  std::snprintf (buf, sizeof buf, "%0*llx", digits, static_cast<unsigned long long> (value));
  return buf;
}

std::string
mac48 (std::uint64_t value)
{
  std::string out;
  for (int i = 5; i >= 0; --i)
    {
      out += hex_n ((value >> (8 * i)) & 0xFF, 2);
      if (i)
        out += ':';
    }
  return out;
}

// --- Zigbee ----------------------------------------------------------------

constexpr std::uint16_t kAddrModeNone = 0b00;
constexpr std::uint16_t kAddrModeShort = 0b10;
constexpr std::uint16_t kAddrModeExtended = 0b11;

bool
is_beacon_request (const ZigbeeFrame& f)
{
  return f.type == ZigbeeFrameType::MacCommand && !f.payload.empty () && f.payload[0] == kZigbeeBeaconRequest;
}

Bytes
zigbee_body (const ZigbeeFrame& f)
{
  if (f.type == ZigbeeFrameType::MacCommand && f.payload.empty ())
    {
      fail (FrameError::Kind::Encode, 0, "MAC command frame needs a command identifier");
    }
  if (is_beacon_request (f))
    {
      if (!f.dest || f.dest->pan_id != 0xFFFF || f.dest->addr != 0xFFFF)
        fail (FrameError::Kind::Encode, 0, "beacon request must be broadcast to PAN 0xFFFF / 0xFFFF");
      if (f.src)
        fail (FrameError::Kind::Encode, 0, "beacon request carries no source address");
    }
  if (f.type == ZigbeeFrameType::Beacon && !f.src)
    {
      fail (FrameError::Kind::Encode, 0, "beacon frame needs a source address");
    }

  std::uint16_t fcf = static_cast<std::uint16_t> (f.type) & 0x7;
  fcf |= static_cast<std::uint16_t> ((f.dest ? kAddrModeShort : kAddrModeNone) << 10);
  std::uint16_t srcMode = kAddrModeNone;
  if (f.src)
    {
      srcMode = std::holds_alternative<ZigbeeShortAddress> (f.src->addr) ? kAddrModeShort : kAddrModeExtended;
    }
  fcf |= static_cast<std::uint16_t> (srcMode << 14);

  Bytes out;
  put_le (out, fcf, 2);
  out.push_back (f.seq);
  if (f.dest)
    {
      put_le (out, f.dest->pan_id, 2);
      put_le (out, f.dest->addr, 2);
    }
  if (f.src)
    {
      put_le (out, f.src->pan_id, 2);
      if (const auto* s = std::get_if<ZigbeeShortAddress> (&f.src->addr))
        put_le (out, s->value, 2);
      else
        put_le (out, std::get<ZigbeeExtendedAddress> (f.src->addr).value, 8);
    }
  out.insert (out.end (), f.payload.begin (), f.payload.end ());
  return out;
}

ZigbeeFrame
decode_zigbee (std::span<const std::uint8_t> in)
{
  if (in.size () < 5)
    fail (FrameError::Kind::Truncated, in.size (), "802.15.4 frame shorter than FCF + seq + FCS");

  const auto fcf = static_cast<std::uint16_t> (get_le (in, 0, 2));
  const auto typeCode = fcf & 0x7;
  if (typeCode != 0 && typeCode != 1 && typeCode != 3)
    fail (FrameError::Kind::Unsupported, 0, "802.15.4 frame type " + std::to_string (typeCode));
  const auto destMode = (fcf >> 10) & 0x3;
  const auto srcMode = (fcf >> 14) & 0x3;
  if (destMode != kAddrModeNone && destMode != kAddrModeShort)
    fail (FrameError::Kind::Unsupported, 1, "destination addressing mode " + std::to_string (destMode));
  if (srcMode == 0b01)
    fail (FrameError::Kind::Unsupported, 1, "reserved source addressing mode");

  std::size_t header = 3;
  header += destMode == kAddrModeShort ? 4 : 0;
  header += srcMode == kAddrModeShort ? 4 : srcMode == kAddrModeExtended ? 10 : 0;
  if (in.size () < header + 2)
    fail (FrameError::Kind::Truncated, in.size (), "802.15.4 addressing fields run past end of frame");

  const std::size_t fcsAt = in.size () - 2;
  const auto fcs = static_cast<std::uint16_t> (get_le (in, fcsAt, 2));
  if (checksum::crc16_802154 (in.first (fcsAt)) != fcs)
    fail (FrameError::Kind::Checksum, fcsAt, "802.15.4 FCS mismatch");

  ZigbeeFrame f;
  f.type = static_cast<ZigbeeFrameType> (typeCode);
  f.seq = in[2];
  std::size_t at = 3;
  if (destMode == kAddrModeShort)
    {
      f.dest = ZigbeeDestination{static_cast<std::uint16_t> (get_le (in, at, 2)),
                                 static_cast<std::uint16_t> (get_le (in, at + 2, 2))};
      at += 4;
    }
  if (srcMode != kAddrModeNone)
    {
      ZigbeeSource src;
      src.pan_id = static_cast<std::uint16_t> (get_le (in, at, 2));
      at += 2;
      if (srcMode == kAddrModeShort)
        {
          src.addr = ZigbeeShortAddress{static_cast<std::uint16_t> (get_le (in, at, 2))};
          at += 2;
        }
      else
        {
          src.addr = ZigbeeExtendedAddress{get_le (in, at, 8)};
          at += 8;
        }
      f.src = src;
    }
  f.payload.assign (in.begin () + static_cast<std::ptrdiff_t> (at), in.begin () + static_cast<std::ptrdiff_t> (fcsAt));
  if (f.type == ZigbeeFrameType::MacCommand && f.payload.empty ())
    fail (FrameError::Kind::Truncated, at, "MAC command frame without command identifier");
  f.fcs = fcs;
  return f;
}

// --- BLE -------------------------------------------------------------------

bool
valid_pdu_type (std::uint8_t code)
{
  return code == 0x0 || code == 0x2 || code == 0x6;
}

Bytes
ble_pdu (const BleAdvPdu& p)
{
  if (p.adv_data.size () > kBleMaxAdvData)
    fail (FrameError::Kind::Encode, 0, "advertising data longer than 31 bytes");
  if (p.adv_a > 0xFFFFFFFFFFFFull)
    fail (FrameError::Kind::Encode, 0, "AdvA wider than 48 bits");
  if (!valid_pdu_type (static_cast<std::uint8_t> (p.type)))
    fail (FrameError::Kind::Encode, 0, "unsupported advertising PDU type");
  Bytes pdu;
  pdu.push_back (static_cast<std::uint8_t> (p.type) & 0x0F);
  pdu.push_back (static_cast<std::uint8_t> (6 + p.adv_data.size ()));
  put_le (pdu, p.adv_a, 6);
  pdu.insert (pdu.end (), p.adv_data.begin (), p.adv_data.end ());
  return pdu;
}

BleAdvPdu
decode_ble (std::span<const std::uint8_t> in)
{
  if (in.size () < 4)
    fail (FrameError::Kind::Truncated, in.size (), "missing access address");
  if (get_le (in, 0, 4) != kBleAdvertisingAccessAddress)
    fail (FrameError::Kind::Unsupported, 0, "access address is not the advertising constant 0x8E89BED6");
  if (in.size () < 6)
    fail (FrameError::Kind::Truncated, in.size (), "missing PDU header");
  const std::uint8_t typeCode = in[4] & 0x0F;
  if (!valid_pdu_type (typeCode))
    fail (FrameError::Kind::Unsupported, 4, "advertising PDU type " + std::to_string (typeCode));
  const std::size_t length = in[5];
  if (length < 6 || length > 6 + kBleMaxAdvData)
    fail (FrameError::Kind::Unsupported, 5, "advertising PDU length " + std::to_string (length));
  const std::size_t crcAt = 6 + length;
  if (in.size () < crcAt + 3)
    fail (FrameError::Kind::Truncated, in.size (), "advertising PDU runs past end of frame");
  const auto crc = static_cast<std::uint32_t> (get_le (in, crcAt, 3));
  if (checksum::crc24_ble (in.subspan (4, 2 + length)) != crc)
    fail (FrameError::Kind::Checksum, crcAt, "BLE CRC-24 mismatch");

  BleAdvPdu p;
  p.type = static_cast<BlePduType> (typeCode);
  p.adv_a = get_le (in, 6, 6);
  p.adv_data.assign (in.begin () + 12, in.begin () + static_cast<std::ptrdiff_t> (crcAt));
  p.crc = crc;
  return p;
}

// --- LoRa ------------------------------------------------------------------

LoRaFrame
decode_lora (std::span<const std::uint8_t> in)
{
  if (in.size () < 6)
    fail (FrameError::Kind::Truncated, in.size (), "LoRa frame needs sync word and 4 payload bytes");
  LoRaFrame f;
  f.sync_word = static_cast<std::uint16_t> (get_be (in, 0, 2));
  f.payload.assign (in.begin () + 2, in.end ());
  return f;
}

// --- Z-Wave ----------------------------------------------------------------

constexpr std::size_t kZWaveHeader = 9;

std::size_t
check_width (ZWaveCheck kind)
{
  return kind == ZWaveCheck::Xor8 ? 1 : 2;
}

Bytes
zwave_body (const ZWaveFrame& f)
{
  const std::size_t length = f.mpdu_length ();
  if (length > 0xFF)
    fail (FrameError::Kind::Encode, 7, "Z-Wave MPDU longer than 255 bytes");
  Bytes out;
  put_be (out, f.home_id, 4);
  out.push_back (f.source_id);
  put_le (out, f.frame_control, 2);
  out.push_back (static_cast<std::uint8_t> (length));
  out.push_back (f.dest_id);
  out.insert (out.end (), f.payload.begin (), f.payload.end ());
  return out;
}

std::uint16_t
zwave_check_value (ZWaveCheck kind, std::span<const std::uint8_t> body)
{
  return kind == ZWaveCheck::Xor8 ? checksum::zwave_xor8 (body) : checksum::zwave_crc16 (body);
}

std::uint16_t
read_check (ZWaveCheck kind, std::span<const std::uint8_t> in, std::size_t at)
{
  // Check bytes are sent MSB first, as in G.9959.
  return static_cast<std::uint16_t> (get_be (in, at, static_cast<int> (check_width (kind))));
}

ZWaveFrame
decode_zwave (std::span<const std::uint8_t> in, const DecodeOptions& options)
{
  if (in.size () < kZWaveHeader + 1)
    fail (FrameError::Kind::Truncated, in.size (), "Z-Wave frame shorter than MAC header + check");
  const std::size_t length = in[7];
  const std::size_t minCheck = options.zwave_check ? check_width (*options.zwave_check) : 1;
  if (length < kZWaveHeader + minCheck)
    fail (FrameError::Kind::Unsupported, 7, "Z-Wave length field " + std::to_string (length));
  if (length > in.size ())
    fail (FrameError::Kind::Truncated, in.size (), "Z-Wave length field exceeds received bytes");
  const auto mpdu = in.first (length);

  auto verifies = [&] (ZWaveCheck kind) {
    const std::size_t w = check_width (kind);
    if (length < kZWaveHeader + w)
      return false;
    return zwave_check_value (kind, mpdu.first (length - w)) == read_check (kind, mpdu, length - w);
  };

  ZWaveCheck kind;
  if (options.zwave_check)
    {
      kind = *options.zwave_check;
      if (!verifies (kind))
        fail (FrameError::Kind::Checksum, length - check_width (kind), "Z-Wave frame check mismatch");
    }
  else if (verifies (ZWaveCheck::Xor8))
    {
      kind = ZWaveCheck::Xor8;
    }
  else if (verifies (ZWaveCheck::Crc16))
    {
      kind = ZWaveCheck::Crc16;
    }
  else
    {
      fail (FrameError::Kind::Checksum, length - 1, "Z-Wave frame check matches neither XOR nor CRC-16");
    }

  const std::size_t w = check_width (kind);
  ZWaveFrame f;
  f.check_kind = kind;
  f.home_id = static_cast<std::uint32_t> (get_be (mpdu, 0, 4));
  f.source_id = mpdu[4];
  f.frame_control = static_cast<std::uint16_t> (get_le (mpdu, 5, 2));
  f.dest_id = mpdu[8];
  f.payload.assign (mpdu.begin () + kZWaveHeader, mpdu.begin () + static_cast<std::ptrdiff_t> (length - w));
  f.check = read_check (kind, mpdu, length - w);
  return f;
}

} // namespace

// ---------------------------------------------------------------------------

bool
has_identity (const DeviceAddress& address)
{
  return !std::holds_alternative<std::monostate> (address);
}

std::optional<Protocol>
address_protocol (const DeviceAddress& address)
{
  return std::visit (Overloaded{
                       [] (std::monostate) -> std::optional<Protocol> { return std::nullopt; },
                       [] (const ZigbeeShort&) -> std::optional<Protocol> { return Protocol::Zigbee; },
                       [] (const ZigbeeExtended&) -> std::optional<Protocol> { return Protocol::Zigbee; },
                       [] (const BleAdvA&) -> std::optional<Protocol> { return Protocol::BleAdvertising; },
                       [] (const LoRaId&) -> std::optional<Protocol> { return Protocol::LoRa; },
                       [] (const ZWaveId&) -> std::optional<Protocol> { return Protocol::ZWave; },
                     },
                     address);
}

std::string
to_string (const DeviceAddress& address)
{
  return std::visit (Overloaded{
                       [] (std::monostate) -> std::string { return "none"; },
                       [] (const ZigbeeShort& a) {
                         return "zigbee-short " + hex_n (a.pan_id, 4) + ":" + hex_n (a.addr, 4);
                       },
                       [] (const ZigbeeExtended& a) { return "zigbee-ext " + hex_n (a.addr, 16); },
                       [] (const BleAdvA& a) { return "ble " + mac48 (a.addr); },
                       [] (const LoRaId& a) { return "lora " + hex_n (a.sync_word, 4) + ":" + hex_n (a.id, 2); },
                       [] (const ZWaveId& a) {
                         return "zwave " + hex_n (a.home_id, 8) + ":" + hex_n (a.source_id, 2);
                       },
                     },
                     address);
}

namespace {

std::uint64_t
parse_hex_field (std::string_view text, int maxDigits, std::string_view what)
{
  if (text.starts_with ("0x") || text.starts_with ("0X"))
    text.remove_prefix (2);
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars (text.data (), text.data () + text.size (), value, 16);
  if (text.empty () || static_cast<int> (text.size ()) > maxDigits || ec != std::errc ()
      || ptr != text.data () + text.size ())
    {
      throw DomainError ("malformed " + std::string (what) + " '" + std::string (text) + "'");
    }
  return value;
}

std::pair<std::string_view, std::string_view>
split_pair (std::string_view value, char sep, std::string_view what)
{
  const auto at = value.find (sep);
  if (at == std::string_view::npos)
    throw DomainError (std::string (what) + " needs the form A" + sep + "B, got '" + std::string (value) + "'");
  return {value.substr (0, at), value.substr (at + 1)};
}

} // namespace

DeviceAddress
parse_device_address (std::string_view kind, std::string_view value)
{
  if (kind == "zigbee-short")
    {
      auto [pan, addr] = split_pair (value, ':', "zigbee-short address");
      return ZigbeeShort{static_cast<std::uint16_t> (parse_hex_field (pan, 4, "PAN id")),
                         static_cast<std::uint16_t> (parse_hex_field (addr, 4, "short address"))};
    }
  if (kind == "zigbee-ext")
    {
      return ZigbeeExtended{parse_hex_field (value, 16, "extended address")};
    }
  if (kind == "ble")
    {
      std::string digits;
      for (char c : value)
        {
          if (c != ':')
            digits += c;
        }
      if (digits.size () != 12)
        throw DomainError ("BLE address needs 6 bytes, got '" + std::string (value) + "'");
      return BleAdvA{parse_hex_field (digits, 12, "BLE address")};
    }
  if (kind == "lora")
    {
      auto [sync, id] = split_pair (value, ':', "lora id");
      return LoRaId{static_cast<std::uint16_t> (parse_hex_field (sync, 4, "sync word")),
                    static_cast<std::uint8_t> (parse_hex_field (id, 2, "device id"))};
    }
  if (kind == "zwave")
    {
      auto [home, src] = split_pair (value, ':', "zwave id");
      return ZWaveId{static_cast<std::uint32_t> (parse_hex_field (home, 8, "home id")),
                     static_cast<std::uint8_t> (parse_hex_field (src, 2, "source id"))};
    }
  throw DomainError ("unknown address kind '" + std::string (kind) + "'");
}

ZigbeeFrame
ZigbeeFrame::beacon_request (std::uint8_t seq)
{
  ZigbeeFrame f;
  f.type = ZigbeeFrameType::MacCommand;
  f.seq = seq;
  f.dest = ZigbeeDestination{0xFFFF, 0xFFFF};
  f.payload = {kZigbeeBeaconRequest};
  return f;
}

std::size_t
ZWaveFrame::mpdu_length () const
{
  return kZWaveHeader + payload.size () + check_width (check_kind);
}

Protocol
protocol_of (const DecodedFrame& frame)
{
  return std::visit (Overloaded{
                       [] (const ZigbeeFrame&) { return Protocol::Zigbee; },
                       [] (const BleAdvPdu&) { return Protocol::BleAdvertising; },
                       [] (const LoRaFrame&) { return Protocol::LoRa; },
                       [] (const ZWaveFrame&) { return Protocol::ZWave; },
                     },
                     frame);
}

ZWaveCheck
zwave_check_for (const Channel& channel)
{
  return channel.label == "zwave-r3" ? ZWaveCheck::Crc16 : ZWaveCheck::Xor8;
}

Frame
encode (const DecodedFrame& frame)
{
  return std::visit (
    Overloaded{
      [] (const ZigbeeFrame& f) {
        Bytes out = zigbee_body (f);
        const auto fcs = checksum::crc16_802154 (out);
        if (f.fcs && *f.fcs != fcs)
          fail (FrameError::Kind::Encode, out.size (), "stored FCS does not match frame body");
        put_le (out, fcs, 2);
        return Frame{Protocol::Zigbee, std::move (out)};
      },
      [] (const BleAdvPdu& p) {
        const Bytes pdu = ble_pdu (p);
        const auto crc = checksum::crc24_ble (pdu);
        if (p.crc && *p.crc != crc)
          fail (FrameError::Kind::Encode, 4 + pdu.size (), "stored CRC does not match PDU");
        Bytes out;
        put_le (out, kBleAdvertisingAccessAddress, 4);
        out.insert (out.end (), pdu.begin (), pdu.end ());
        put_le (out, crc, 3);
        return Frame{Protocol::BleAdvertising, std::move (out)};
      },
      [] (const LoRaFrame& f) {
        if (f.payload.size () < 4)
          fail (FrameError::Kind::Encode, 2, "LoRa payload needs at least 4 bytes");
        Bytes out;
        put_be (out, f.sync_word, 2);
        out.insert (out.end (), f.payload.begin (), f.payload.end ());
        return Frame{Protocol::LoRa, std::move (out)};
      },
      [] (const ZWaveFrame& f) {
        Bytes out = zwave_body (f);
        const auto check = zwave_check_value (f.check_kind, out);
        if (f.check && *f.check != check)
          fail (FrameError::Kind::Encode, out.size (), "stored frame check does not match body");
        put_be (out, check, static_cast<int> (check_width (f.check_kind)));
        return Frame{Protocol::ZWave, std::move (out)};
      },
    },
    frame);
}

DecodedFrame
seal (DecodedFrame frame)
{
  const Frame wire = encode (frame);
  std::visit (Overloaded{
                [&] (ZigbeeFrame& f) { f.fcs = static_cast<std::uint16_t> (get_le (wire.bytes, wire.bytes.size () - 2, 2)); },
                [&] (BleAdvPdu& p) { p.crc = static_cast<std::uint32_t> (get_le (wire.bytes, wire.bytes.size () - 3, 3)); },
                [] (LoRaFrame&) {},
                [&] (ZWaveFrame& f) {
                  const std::size_t w = check_width (f.check_kind);
                  f.check = read_check (f.check_kind, wire.bytes, wire.bytes.size () - w);
                },
              },
              frame);
  return frame;
}

DecodedFrame
decode (Protocol protocol, std::span<const std::uint8_t> bytes, const DecodeOptions& options)
{
  switch (protocol)
    {
    case Protocol::Zigbee:
      return decode_zigbee (bytes);
    case Protocol::BleAdvertising:
      return decode_ble (bytes);
    case Protocol::LoRa:
      return decode_lora (bytes);
    case Protocol::ZWave:
      return decode_zwave (bytes, options);
    }
  fail (FrameError::Kind::Unsupported, 0, "unknown protocol");
}

DeviceAddress
extract_address (const DecodedFrame& frame, const AddressOptions& options)
{
  return std::visit (Overloaded{
                       [] (const ZigbeeFrame& f) -> DeviceAddress {
                         if (!f.src)
                           return std::monostate{};
                         if (const auto* s = std::get_if<ZigbeeShortAddress> (&f.src->addr))
                           return ZigbeeShort{f.src->pan_id, s->value};
                         return ZigbeeExtended{std::get<ZigbeeExtendedAddress> (f.src->addr).value};
                       },
                       [] (const BleAdvPdu& p) -> DeviceAddress { return BleAdvA{p.adv_a}; },
                       [&] (const LoRaFrame& f) -> DeviceAddress {
                         if (options.lora_id_index >= f.payload.size ())
                           return std::monostate{};
                         return LoRaId{f.sync_word, f.payload[options.lora_id_index]};
                       },
                       [] (const ZWaveFrame& f) -> DeviceAddress { return ZWaveId{f.home_id, f.source_id}; },
                     },
                     frame);
}

std::string
describe (const DecodedFrame& frame)
{
  std::ostringstream os;
  std::visit (Overloaded{
                [&] (const ZigbeeFrame& f) {
                  static constexpr std::array<const char*, 4> names{"Beacon", "Data", "?", "MAC command"};
                  os << "protocol      zigbee (IEEE 802.15.4 MAC)\n";
                  os << "frame type    " << names[static_cast<int> (f.type)];
                  if (is_beacon_request (f))
                    os << " (beacon request)";
                  os << "\nsequence      " << static_cast<int> (f.seq) << "\n";
                  if (f.dest)
                    os << "dest          pan 0x" << hex_n (f.dest->pan_id, 4) << " addr 0x" << hex_n (f.dest->addr, 4)
                       << "\n";
                  if (f.src)
                    {
                      os << "source        pan 0x" << hex_n (f.src->pan_id, 4);
                      if (const auto* s = std::get_if<ZigbeeShortAddress> (&f.src->addr))
                        os << " short 0x" << hex_n (s->value, 4) << "\n";
                      else
                        os << " extended 0x" << hex_n (std::get<ZigbeeExtendedAddress> (f.src->addr).value, 16)
                           << "\n";
                    }
                  os << "payload       " << to_hex (f.payload) << "\n";
                  if (f.fcs)
                    os << "fcs           0x" << hex_n (*f.fcs, 4) << " (ok)\n";
                },
                [&] (const BleAdvPdu& p) {
                  const char* type = p.type == BlePduType::AdvInd          ? "ADV_IND"
                                     : p.type == BlePduType::AdvNonconnInd ? "ADV_NONCONN_IND"
                                                                           : "ADV_SCAN_IND";
                  os << "protocol      ble (advertising channel PDU)\n";
                  os << "access addr   0x" << hex_n (kBleAdvertisingAccessAddress, 8) << " (advertising)\n";
                  os << "pdu type      " << type << "\n";
                  os << "AdvA          " << mac48 (p.adv_a) << "\n";
                  os << "AdvData       " << to_hex (p.adv_data) << "\n";
                  if (p.crc)
                    os << "crc           0x" << hex_n (*p.crc, 6) << " (ok)\n";
                },
                [&] (const LoRaFrame& f) {
                  os << "protocol      lora\n";
                  os << "sync word     0x" << hex_n (f.sync_word, 4) << "\n";
                  os << "payload       " << to_hex (f.payload) << "\n";
                  if (f.payload.size () >= 5)
                    os << "DevAddr       0x" << hex_n (get_le (f.payload, 1, 4), 8) << " (bytes 1..4)\n";
                },
                [&] (const ZWaveFrame& f) {
                  os << "protocol      zwave (G.9959 MAC, "
                     << (f.check_kind == ZWaveCheck::Xor8 ? "R1/R2 XOR check" : "R3 CRC-16") << ")\n";
                  os << "home id       0x" << hex_n (f.home_id, 8) << "\n";
                  os << "source id     " << static_cast<int> (f.source_id);
                  if (f.source_id == 0)
                    os << " (unjoined)";
                  else if (f.source_id == 1)
                    os << " (primary controller)";
                  os << "\nframe ctl     0x" << hex_n (f.frame_control, 4) << "\n";
                  os << "length        " << f.mpdu_length () << "\n";
                  os << "dest id       " << static_cast<int> (f.dest_id) << "\n";
                  os << "payload       " << to_hex (f.payload) << "\n";
                  if (f.check)
                    os << "check         0x" << hex_n (*f.check, f.check_kind == ZWaveCheck::Xor8 ? 2 : 4) << " (ok)\n";
                },
              },
              frame);
  return os.str ();
}

std::string
to_hex (std::span<const std::uint8_t> bytes)
{
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve (bytes.size () * 2);
  for (std::uint8_t b : bytes)
    {
      out += digits[b >> 4];
      out += digits[b & 0xF];
    }
  return out;
}

Bytes
from_hex (std::string_view hex)
{
  if (hex.size () % 2 != 0)
    throw ParameterError ("hex string has odd length " + std::to_string (hex.size ()));
  auto nibble = [&] (char c, std::size_t at) -> std::uint8_t {
    if (c >= '0' && c <= '9')
      return static_cast<std::uint8_t> (c - '0');
    if (c >= 'a' && c <= 'f')
      return static_cast<std::uint8_t> (c - 'a' + 10);
    if (c >= 'A' && c <= 'F')
      return static_cast<std::uint8_t> (c - 'A' + 10);
    throw ParameterError ("non-hex character at position " + std::to_string (at));
  };
  Bytes out;
  out.reserve (hex.size () / 2);
  for (std::size_t i = 0; i < hex.size (); i += 2)
    {
      out.push_back (static_cast<std::uint8_t> ((nibble (hex[i], i) << 4) | nibble (hex[i + 1], i + 1)));
    }
  return out;
}

} // namespace iotscan
