#include "iotscan/radio_sim.hpp"

#include "iotscan/errors.hpp"
#include "iotscan/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace iotscan {

namespace {

bool
contains (std::span<const Channel> channels, const Channel& ch)
{
  return std::find (channels.begin (), channels.end (), ch) != channels.end ();
}

std::string
device_path (std::size_t index, const char* field)
{
  return "devices[" + std::to_string (index) + "]." + field;
}

std::uint16_t
pan_of (const DeviceSpec& spec)
{
  if (const auto* s = std::get_if<ZigbeeShort> (&spec.address))
    return s->pan_id;
  for (const auto& alias : spec.aliases)
    {
      if (const auto* s = std::get_if<ZigbeeShort> (&alias))
        return s->pan_id;
    }
  return 0x0000;
}

std::optional<ZigbeeSource>
zigbee_source_for (const DeviceAddress& identity, std::uint16_t pan)
{
  if (const auto* s = std::get_if<ZigbeeShort> (&identity))
    return ZigbeeSource{s->pan_id, ZigbeeShortAddress{s->addr}};
  if (const auto* e = std::get_if<ZigbeeExtended> (&identity))
    return ZigbeeSource{pan, ZigbeeExtendedAddress{e->addr}};
  return std::nullopt;
}

Bytes
random_bytes (std::mt19937_64& rng, std::size_t n)
{
  Bytes out (n);
  for (auto& b : out)
    b = static_cast<std::uint8_t> (rng () & 0xFF);
  return out;
}

} // namespace

std::string_view
to_string (DeviceRole role)
{
  switch (role)
    {
    case DeviceRole::Coordinator:
      return "coordinator";
    case DeviceRole::Router:
      return "router";
    case DeviceRole::EndDevice:
      return "end-device";
    case DeviceRole::Gateway:
      return "gateway";
    case DeviceRole::Peripheral:
      return "peripheral";
    }
  return "unknown";
}

std::optional<DeviceRole>
parse_role (std::string_view name)
{
  if (name == "coordinator")
    return DeviceRole::Coordinator;
  if (name == "router")
    return DeviceRole::Router;
  if (name == "end-device" || name == "enddevice")
    return DeviceRole::EndDevice;
  if (name == "gateway")
    return DeviceRole::Gateway;
  if (name == "peripheral")
    return DeviceRole::Peripheral;
  return std::nullopt;
}

void
validate (const RadioScenario& scenario)
{
  if (!(scenario.loss_prob >= 0.0 && scenario.loss_prob <= 1.0))
    throw ScenarioError ("loss_prob", "must lie in [0, 1]");
  if (!(scenario.probe_response_delay_max_s >= 0.0) || !std::isfinite (scenario.probe_response_delay_max_s))
    throw ScenarioError ("probe_response_delay_max", "must be a finite value >= 0");

  std::map<DeviceAddress, std::size_t> seen;
  const ChannelList bleAdv = ble_advertising_channels ();
  for (std::size_t i = 0; i < scenario.devices.size (); ++i)
    {
      const DeviceSpec& d = scenario.devices[i];
      if (d.name.empty ())
        throw ScenarioError (device_path (i, "name"), "must not be empty");
      if (!(d.mean_interarrival_s > 0.0) || !std::isfinite (d.mean_interarrival_s))
        throw ScenarioError (device_path (i, "mean_interarrival"), "must be a finite value > 0");
      if (d.channels.empty ())
        throw ScenarioError (device_path (i, "channels"), "device '" + d.name + "' lists no channel");
      for (const auto& ch : d.channels)
        {
          if (ch.protocol != d.protocol)
            throw ScenarioError (device_path (i, "channels"),
                                 "channel " + ch.label + " does not carry " + std::string (to_string (d.protocol)));
        }
      if (d.protocol == Protocol::Zigbee && d.channels.size () != 1)
        throw ScenarioError (device_path (i, "channels"), "a Zigbee device operates on exactly one channel");
      if (d.protocol == Protocol::BleAdvertising)
        {
          for (const auto& adv : bleAdv)
            {
              if (!contains (d.channels, adv) || d.channels.size () != bleAdv.size ())
                throw ScenarioError (device_path (i, "channels"),
                                     "a BLE advertiser transmits on all of ble-37, ble-38, ble-39");
            }
        }

      auto check_identity = [&] (const DeviceAddress& a, const char* field) {
        if (address_protocol (a) != d.protocol)
          throw ScenarioError (device_path (i, field), "address " + to_string (a) + " does not match protocol "
                                                         + std::string (to_string (d.protocol)));
        auto [it, inserted] = seen.emplace (a, i);
        if (!inserted)
          throw ScenarioError (device_path (i, field), "address " + to_string (a) + " already used by device '"
                                                         + scenario.devices[it->second].name + "'");
      };
      check_identity (d.address, "address");
      for (const auto& alias : d.aliases)
        check_identity (alias, "alias");
    }
}

Environment::Environment (RadioScenario scenario, std::uint64_t seed)
  : m_scenario (std::move (scenario)),
    m_probeRng (derive_seed (seed, 0xFFFF'FFFFull))
{
  validate (m_scenario);
  m_devices.reserve (m_scenario.devices.size ());
  for (std::size_t i = 0; i < m_scenario.devices.size (); ++i)
    {
      const DeviceSpec& spec = m_scenario.devices[i];
      SimDevice dev{spec, std::mt19937_64 (derive_seed (seed, 2 * i)), std::mt19937_64 (derive_seed (seed, 2 * i + 1))};
      if (spec.mode == EmitterMode::Periodic)
        {
          dev.next_time = std::uniform_real_distribution<double> (0.0, spec.mean_interarrival_s) (dev.traffic);
        }
      else
        {
          dev.next_time = std::exponential_distribution<double> (1.0 / spec.mean_interarrival_s) (dev.traffic);
        }
      const DeviceId id{static_cast<std::uint32_t> (i)};
      m_addressTable.emplace (spec.address, id);
      for (const auto& alias : spec.aliases)
        m_addressTable.emplace (alias, id);
      m_devices.push_back (std::move (dev));
    }
}

void
Environment::schedule_next (SimDevice& dev)
{
  if (dev.spec.mode == EmitterMode::Periodic)
    {
      dev.next_time += dev.spec.mean_interarrival_s;
      return;
    }
  dev.next_time += std::exponential_distribution<double> (1.0 / dev.spec.mean_interarrival_s) (dev.traffic);
}

bool
Environment::lost (SimDevice& dev)
{
  const double u = std::uniform_real_distribution<double> (0.0, 1.0) (dev.content);
  return u < m_scenario.loss_prob;
}

void
Environment::advance_to (double t)
{
  if (t < m_clock)
    throw SimulationError ("clock regression: " + std::to_string (t) + " < " + std::to_string (m_clock));
  m_clock = t;
}

Frame
Environment::make_traffic_frame (const SimDevice& dev, const Channel& channel, std::uint64_t frameSeed) const
{
  // Frame contents are a pure function of the per-emission seed.
  std::mt19937_64 rng (frameSeed);
  const DeviceSpec& spec = dev.spec;
  const auto seq = static_cast<std::uint8_t> (dev.emitted);

  switch (spec.protocol)
    {
    case Protocol::Zigbee:
      {
        ZigbeeFrame f;
        f.type = ZigbeeFrameType::Data;
        f.seq = seq;
        const std::uint16_t pan = pan_of (spec);
        f.dest = ZigbeeDestination{pan, spec.role == DeviceRole::Coordinator ? std::uint16_t{0xFFFF} : std::uint16_t{0x0000}};
        const std::size_t pick = spec.aliases.empty () ? 0 : rng () % (spec.aliases.size () + 1);
        f.src = zigbee_source_for (pick == 0 ? spec.address : spec.aliases[pick - 1], pan);
        f.payload = random_bytes (rng, 4 + rng () % 12);
        return encode (f);
      }
    case Protocol::BleAdvertising:
      {
        BleAdvPdu p;
        p.type = spec.role == DeviceRole::Peripheral ? BlePduType::AdvInd : BlePduType::AdvNonconnInd;
        p.adv_a = std::get<BleAdvA> (spec.address).addr;
        p.adv_data = {0x02, 0x01, 0x06};
        const std::size_t extra = rng () % 12;
        if (extra > 0)
          {
            p.adv_data.push_back (static_cast<std::uint8_t> (extra + 1));
            p.adv_data.push_back (0xFF);
            const Bytes more = random_bytes (rng, extra);
            p.adv_data.insert (p.adv_data.end (), more.begin (), more.end ());
          }
        return encode (p);
      }
    case Protocol::LoRa:
      {
        const auto& id = std::get<LoRaId> (spec.address);
        LoRaFrame f;
        f.sync_word = id.sync_word;
        const std::size_t index = m_scenario.address_options.lora_id_index;
        f.payload = random_bytes (rng, std::max<std::size_t> (12, index + 1));
        f.payload[0] = 0x40;
        f.payload[index] = id.id;
        return encode (f);
      }
    case Protocol::ZWave:
      {
        const auto& id = std::get<ZWaveId> (spec.address);
        ZWaveFrame f;
        f.check_kind = zwave_check_for (channel);
        f.home_id = id.home_id;
        f.source_id = id.source_id;
        f.frame_control = static_cast<std::uint16_t> (0x0041u | ((seq & 0x0Fu) << 8));
        f.dest_id = id.source_id == 1 ? 0xFF : 0x01;
        f.payload = random_bytes (rng, 2 + rng () % 6);
        return encode (f);
      }
    }
  throw SimulationError ("device with unknown protocol");
}

Frame
Environment::make_beacon (SimDevice& dev)
{
  ZigbeeFrame f;
  f.type = ZigbeeFrameType::Beacon;
  f.seq = dev.beacon_seq++;
  f.src = zigbee_source_for (dev.spec.address, pan_of (dev.spec));
  const bool coordinator = dev.spec.role == DeviceRole::Coordinator;
  // superframe spec, GTS, pending addresses, Zigbee beacon payload head
  f.payload = {0xFF, static_cast<std::uint8_t> (coordinator ? 0xCF : 0x8F), 0x00, 0x00, 0x00, 0x22, 0x84};
  return encode (f);
}

void
Environment::record (const std::vector<Emission>& delivered)
{
  if (m_logging)
    m_log.insert (m_log.end (), delivered.begin (), delivered.end ());
}

std::vector<Emission>
Environment::emissions_in (std::span<const Channel> channels, double t0, double t1)
{
  if (t1 < t0)
    throw SimulationError ("window end precedes window start");
  if (t0 < m_clock)
    throw SimulationError ("window start " + std::to_string (t0) + " precedes clock " + std::to_string (m_clock));

  std::vector<Emission> out;
  for (std::size_t i = 0; i < m_devices.size (); ++i)
    {
      SimDevice& dev = m_devices[i];
      const bool listening = std::any_of (dev.spec.channels.begin (), dev.spec.channels.end (),
                                          [&] (const Channel& c) { return contains (channels, c); });
      if (!listening)
        continue;
      while (dev.next_time < t1)
        {
          // Every emission consumes the same draws whether or not it is heard.
          const std::uint64_t frameSeed = dev.content ();
          for (const Channel& ch : dev.spec.channels)
            {
              const bool dropped = lost (dev);
              if (dev.next_time >= t0 && !dropped && contains (channels, ch))
                {
                  out.push_back (Emission{dev.next_time, ch, make_traffic_frame (dev, ch, frameSeed),
                                          DeviceId{static_cast<std::uint32_t> (i)}});
                }
            }
          ++dev.emitted;
          schedule_next (dev);
        }
    }

  std::vector<Emission> keep;
  for (auto& e : m_pending)
    {
      if (e.time_s >= t1)
        keep.push_back (std::move (e));
      else if (e.time_s >= t0 && contains (channels, e.channel))
        out.push_back (std::move (e));
    }
  m_pending = std::move (keep);

  std::stable_sort (out.begin (), out.end (), [] (const Emission& a, const Emission& b) {
    return a.time_s < b.time_s || (a.time_s == b.time_s && a.device < b.device);
  });
  m_clock = t1;
  record (out);
  return out;
}

std::vector<Emission>
Environment::emissions_in (const Channel& channel, double t0, double t1)
{
  return emissions_in (std::span<const Channel> (&channel, 1), t0, t1);
}

std::vector<Emission>
Environment::inject_probe (const Channel& channel, double t)
{
  if (channel.protocol != Protocol::Zigbee)
    throw UnsupportedProbe ("no broadcast probe exists for " + std::string (to_string (channel.protocol)) + " channel "
                            + channel.label);
  advance_to (t);

  std::vector<Emission> scheduled;
  std::uniform_real_distribution<double> delay (0.0, m_scenario.probe_response_delay_max_s);
  std::uniform_real_distribution<double> unit (0.0, 1.0);
  for (std::size_t i = 0; i < m_devices.size (); ++i)
    {
      SimDevice& dev = m_devices[i];
      if (!dev.spec.responds_to_probe || !contains (dev.spec.channels, channel))
        continue;
      const double at = t + delay (m_probeRng);
      if (unit (m_probeRng) < m_scenario.loss_prob)
        continue;
      scheduled.push_back (Emission{at, channel, make_beacon (dev), DeviceId{static_cast<std::uint32_t> (i)}});
    }
  m_pending.insert (m_pending.end (), scheduled.begin (), scheduled.end ());
  return scheduled;
}

void
Environment::inject_emission (Emission e)
{
  if (e.time_s < m_clock)
    throw SimulationError ("injected frame at " + std::to_string (e.time_s) + " precedes clock "
                           + std::to_string (m_clock));
  if (e.device != kExternalDevice && e.device.value >= m_devices.size ())
    throw SimulationError ("injected frame names unknown device " + std::to_string (e.device.value));
  m_pending.push_back (std::move (e));
}

std::optional<DeviceId>
Environment::resolve (const DeviceAddress& address) const
{
  auto it = m_addressTable.find (address);
  if (it == m_addressTable.end ())
    return std::nullopt;
  return it->second;
}

Environment
build_environment (const RadioScenario& scenario, std::uint64_t seed)
{
  return Environment (scenario, seed);
}

void
write_event_log_csv (std::ostream& os, const Environment& env)
{
  os << "time_s,channel_label,protocol,device,frame_hex\n";
  char buf[64];
  for (const auto& e : env.event_log ())
    {
      std::snprintf (buf, sizeof buf, "%.6f", e.time_s);
      os << buf << ',' << e.channel.label << ',' << to_string (e.channel.protocol) << ','
         << (e.device == kExternalDevice ? std::string ("external") : env.device (e.device).name) << ',' << to_hex (e.frame.bytes) << '\n';
    }
}

} // namespace iotscan
