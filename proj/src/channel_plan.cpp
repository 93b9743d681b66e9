#include "iotscan/channel_plan.hpp"

#include "iotscan/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <tuple>

namespace iotscan {

namespace {

std::string
lower (std::string_view s)
{
  std::string out (s);
  std::transform (out.begin (), out.end (), out.begin (),
                  [] (unsigned char c) { return static_cast<char> (std::tolower (c)); });
  return out;
}

std::optional<int>
parse_int (std::string_view s)
{
  int value = 0;
  auto [ptr, ec] = std::from_chars (s.data (), s.data () + s.size (), value);
  if (ec != std::errc () || ptr != s.data () + s.size () || s.empty ())
    {
      return std::nullopt;
    }
  return value;
}

void
require_range (int k, int lo, int hi, const char* what)
{
  if (k < lo || k > hi)
    {
      throw DomainError (std::string (what) + " index " + std::to_string (k) + " outside ["
                         + std::to_string (lo) + ", " + std::to_string (hi) + "]");
    }
}

} // namespace

std::string_view
to_string (Protocol protocol)
{
  switch (protocol)
    {
    case Protocol::Zigbee:
      return "zigbee";
    case Protocol::BleAdvertising:
      return "ble";
    case Protocol::LoRa:
      return "lora";
    case Protocol::ZWave:
      return "zwave";
    }
  return "unknown";
}

std::optional<Protocol>
parse_protocol (std::string_view name)
{
  const std::string n = lower (name);
  if (n == "zigbee")
    return Protocol::Zigbee;
  if (n == "ble" || n == "ble-adv" || n == "bleadvertising")
    return Protocol::BleAdvertising;
  if (n == "lora")
    return Protocol::LoRa;
  if (n == "zwave" || n == "z-wave")
    return Protocol::ZWave;
  return std::nullopt;
}

Channel
Channel::make (Hz centerHz, Hz bandwidthHz, Protocol protocol, std::string label)
{
  if (bandwidthHz <= 0)
    {
      throw DomainError ("channel bandwidth must be positive");
    }
  if (centerHz <= 0)
    {
      throw DomainError ("channel center frequency must be positive");
    }
  if (label.empty ())
    {
      throw DomainError ("channel label must not be empty");
    }
  return Channel{centerHz, bandwidthHz, protocol, std::move (label)};
}

bool
frequency_less (const Channel& a, const Channel& b)
{
  return std::tie (a.center_hz, a.protocol, a.label) < std::tie (b.center_hz, b.protocol, b.label);
}

bool
is_ascending (const ChannelList& channels)
{
  return std::is_sorted (channels.begin (), channels.end (),
                         [] (const Channel& a, const Channel& b) { return a.center_hz < b.center_hz; });
}

void
sort_ascending (ChannelList& channels)
{
  std::stable_sort (channels.begin (), channels.end (), frequency_less);
}

Channel
zigbee_channel (int k)
{
  require_range (k, 11, 26, "zigbee channel");
  return Channel::make (2405 * kMHz + 5 * kMHz * (k - 11), 2 * kMHz, Protocol::Zigbee,
                        "zigbee-" + std::to_string (k));
}

ChannelList
zigbee_channels ()
{
  ChannelList out;
  for (int k = 11; k <= 26; ++k)
    {
      out.push_back (zigbee_channel (k));
    }
  return out;
}

ChannelList
ble_advertising_channels ()
{
  return {
    Channel::make (2402 * kMHz, 1 * kMHz, Protocol::BleAdvertising, "ble-37"),
    Channel::make (2426 * kMHz, 1 * kMHz, Protocol::BleAdvertising, "ble-38"),
    Channel::make (2480 * kMHz, 1 * kMHz, Protocol::BleAdvertising, "ble-39"),
  };
}

Channel
ble_rf_channel (int k)
{
  require_range (k, 0, 39, "BLE RF channel");
  return Channel::make (2402 * kMHz + 2 * kMHz * k, 1 * kMHz, Protocol::BleAdvertising,
                        "ble-rf-" + std::to_string (k));
}

Channel
lora_uplink_channel (int k)
{
  require_range (k, 0, 71, "LoRa uplink channel");
  const std::string label = "lora-ul-" + std::to_string (k);
  if (k <= 63)
    {
      return Channel::make (903'200 * kKHz + 200 * kKHz * k, 125 * kKHz, Protocol::LoRa, label);
    }
  return Channel::make (903 * kMHz + 1'600 * kKHz * (k - 64), 500 * kKHz, Protocol::LoRa, label);
}

Channel
lora_downlink_channel (int k)
{
  require_range (k, 0, 7, "LoRa downlink channel");
  return Channel::make (923'300 * kKHz + 600 * kKHz * k, 500 * kKHz, Protocol::LoRa,
                        "lora-dl-" + std::to_string (k));
}

ChannelList
zwave_channels ()
{
  return {
    Channel::make (908'400 * kKHz, 40 * kKHz, Protocol::ZWave, "zwave-r2"),
    Channel::make (916 * kMHz, 100 * kKHz, Protocol::ZWave, "zwave-r3"),
  };
}

Channel
zwave_r1_channel ()
{
  // 9.6 kbps Manchester-coded; 20 kHz occupied bandwidth assumed.
  return Channel::make (908'400 * kKHz, 20 * kKHz, Protocol::ZWave, "zwave-r1");
}

ChannelList
yolink_lora_channels ()
{
  return {
    Channel::make (910'290 * kKHz, 125 * kKHz, Protocol::LoRa, "yolink-ul"),
    Channel::make (923'290 * kKHz, 125 * kKHz, Protocol::LoRa, "yolink-dl"),
  };
}

std::optional<Channel>
channel_by_label (std::string_view label)
{
  const std::string l = lower (label);
  auto suffix_int = [&] (std::string_view prefix) -> std::optional<int> {
    if (l.size () <= prefix.size () || l.compare (0, prefix.size (), prefix) != 0)
      {
        return std::nullopt;
      }
    return parse_int (std::string_view (l).substr (prefix.size ()));
  };

  try
    {
      if (auto k = suffix_int ("zigbee-"))
        return zigbee_channel (*k);
      if (auto k = suffix_int ("ble-rf-"))
        return ble_rf_channel (*k);
      if (auto k = suffix_int ("ble-"))
        {
          for (const auto& ch : ble_advertising_channels ())
            {
              if (ch.label == l)
                return ch;
            }
          return std::nullopt;
        }
      if (auto k = suffix_int ("lora-ul-"))
        return lora_uplink_channel (*k);
      if (auto k = suffix_int ("lora-dl-"))
        return lora_downlink_channel (*k);
    }
  catch (const DomainError&)
    {
      return std::nullopt;
    }

  if (l == "zwave-r1")
    return zwave_r1_channel ();
  for (const auto& ch : zwave_channels ())
    {
      if (ch.label == l)
        return ch;
    }
  for (const auto& ch : yolink_lora_channels ())
    {
      if (ch.label == l)
        return ch;
    }
  return std::nullopt;
}

ChannelList
expand_channel_spec (std::string_view spec)
{
  const auto dots = spec.find ("..");
  if (dots == std::string_view::npos)
    {
      auto ch = channel_by_label (spec);
      if (!ch)
        {
          throw DomainError ("unknown channel label '" + std::string (spec) + "'");
        }
      return {*ch};
    }

  // "<prefix><first>..<last>", e.g. zigbee-11..26
  const std::string_view head = spec.substr (0, dots);
  const auto split = head.find_last_not_of ("0123456789");
  const auto last = parse_int (spec.substr (dots + 2));
  const auto first = split == std::string_view::npos ? std::nullopt : parse_int (head.substr (split + 1));
  if (!first || !last || *first > *last)
    {
      throw DomainError ("malformed channel range '" + std::string (spec) + "'");
    }
  const std::string prefix (head.substr (0, split + 1));
  ChannelList out;
  for (int k = *first; k <= *last; ++k)
    {
      auto ch = channel_by_label (prefix + std::to_string (k));
      if (!ch)
        {
          throw DomainError ("channel range '" + std::string (spec) + "' contains unknown label "
                             + prefix + std::to_string (k));
        }
      out.push_back (std::move (*ch));
    }
  return out;
}

} // namespace iotscan
