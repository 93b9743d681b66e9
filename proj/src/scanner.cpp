#include "iotscan/scanner.hpp"

#include "iotscan/errors.hpp"

#include <algorithm>
#include <cmath>

namespace iotscan {

void
validate (const SdrConfig& sdr)
{
  if (sdr.instantaneous_bandwidth_hz <= 0)
    throw ParameterError ("instantaneous bandwidth must be positive");
  if (!(sdr.retune_latency_s >= 0.0) || !std::isfinite (sdr.retune_latency_s))
    throw ParameterError ("retune latency must be a finite value >= 0");
}

void
validate (const ScanParams& params)
{
  if (!(params.dwell_time_s > 0.0) || !std::isfinite (params.dwell_time_s))
    throw ParameterError ("dwell time must be positive");
  if (!(params.scan_time_s >= params.dwell_time_s) || !std::isfinite (params.scan_time_s))
    throw ParameterError ("scan time must be finite and at least the dwell time");
  if (!(params.probe_dwell_time_s > 0.0) || !std::isfinite (params.probe_dwell_time_s))
    throw ParameterError ("probe dwell time must be positive");
}

ChannelList
find_channels_in_range (const ChannelList& channels, Hz bandwidth)
{
  if (channels.empty ())
    throw ParameterError ("find_channels_in_range: empty channel list");
  if (!is_ascending (channels))
    throw ParameterError ("find_channels_in_range: channel list is not sorted by frequency");
  const Channel& first = channels.front ();
  ChannelList range;
  for (const auto& ch : channels)
    {
      if (ch.upper_edge_hz () - first.lower_edge_hz () <= bandwidth)
        range.push_back (ch);
    }
  // A channel wider than the SDR still gets scanned on its own.
  if (range.empty () || !(range.front () == first))
    range.insert (range.begin (), first);
  return range;
}

std::vector<ChannelList>
partition_channels (const ChannelList& channels, Hz bandwidth)
{
  if (channels.empty ())
    throw ParameterError ("partition_channels: empty channel list");
  std::vector<ChannelList> groups;
  ChannelList unscanned = channels;
  while (!unscanned.empty ())
    {
      ChannelList range = find_channels_in_range (unscanned, bandwidth);
      std::erase_if (unscanned, [&] (const Channel& ch) {
        return std::find (range.begin (), range.end (), ch) != range.end ();
      });
      groups.push_back (std::move (range));
    }
  return groups;
}

Scanner::Scanner (Environment& env, SdrConfig sdr)
  : m_env (env),
    m_sdr (sdr),
    m_start (env.clock ())
{
  validate (m_sdr);
}

void
Scanner::hop ()
{
  if (m_sdr.retune_latency_s > 0.0)
    m_env.advance_to (m_env.clock () + m_sdr.retune_latency_s);
}

DeviceSet
Scanner::observe (const ChannelList& channels, double dwell_time_s)
{
  const double t0 = m_env.clock ();
  const double t1 = t0 + dwell_time_s;
  Visit visit{{}, t0, t1};
  for (const auto& ch : channels)
    visit.labels.push_back (ch.label);
  m_visits.push_back (std::move (visit));

  DeviceSet found;
  for (const Emission& e : m_env.emissions_in (channels, t0, t1))
    {
      DecodeOptions decodeOptions;
      if (e.channel.protocol == Protocol::ZWave)
        decodeOptions.zwave_check = zwave_check_for (e.channel);
      DeviceAddress address;
      try
        {
          address = extract_address (decode (e.frame.protocol, e.frame.bytes, decodeOptions),
                                     m_env.scenario ().address_options);
        }
      catch (const FrameError&)
        {
          continue; // corrupted frames are not counted
        }
      if (!has_identity (address))
        continue;
      found.insert (address);
      m_log.addresses.insert (address);
      if (auto id = m_env.resolve (address))
        m_log.first_seen.try_emplace (*id, e.time_s - m_start);
    }
  return found;
}

DeviceSet
Scanner::listen (const Channel& channel, double dwell_time_s)
{
  return observe (ChannelList{channel}, dwell_time_s);
}

DeviceSet
Scanner::passive_scan (const ChannelList& channels, double dwell_time_s, double scan_time_s)
{
  if (channels.empty ())
    throw ParameterError ("passive_scan: empty channel list");
  if (!(dwell_time_s > 0.0))
    throw ParameterError ("passive_scan: dwell time must be positive");
  const double start = m_env.clock ();
  DeviceSet devices;
  std::size_t i = 0;
  while (m_env.clock () - start <= scan_time_s && !stopped ())
    {
      hop ();
      devices.merge (listen (channels[i], dwell_time_s));
      i = (i + 1) % channels.size ();
    }
  return devices;
}

ProbeResult
Scanner::probe_channels (const ChannelList& channels, double dwell_time_s)
{
  ProbeResult result;
  for (const auto& ch : channels)
    {
      hop ();
      m_env.inject_probe (ch, m_env.clock ());
      DeviceSet found = listen (ch, dwell_time_s);
      if (!found.empty ())
        {
          result.devices.merge (found);
          result.active_channels.push_back (ch);
        }
    }
  m_active = result.active_channels;
  return result;
}

DeviceSet
Scanner::active_scan (const ChannelList& channels, const ScanParams& params)
{
  validate (params);
  const double start = m_env.clock ();
  ProbeResult probed = probe_channels (channels, params.probe_dwell_time_s);
  DeviceSet devices = std::move (probed.devices);
  if (probed.active_channels.empty ())
    return devices;
  const double remaining = params.scan_time_s - (m_env.clock () - start);
  devices.merge (passive_scan (probed.active_channels, params.dwell_time_s, remaining));
  return devices;
}

DeviceSet
Scanner::listen_in_parallel (const ChannelList& range, double dwell_time_s)
{
  if (range.empty ())
    throw ParameterError ("listen_in_parallel: empty channel range");
  return observe (range, dwell_time_s);
}

DeviceSet
Scanner::multiprotocol_scan (const ChannelList& channels, double dwell_time_s, double scan_time_s, Hz bandwidth)
{
  if (channels.empty ())
    throw ParameterError ("multiprotocol_scan: empty channel list");
  if (!(dwell_time_s > 0.0))
    throw ParameterError ("multiprotocol_scan: dwell time must be positive");
  m_groups = partition_channels (channels, bandwidth);

  const double start = m_env.clock ();
  DeviceSet devices;
  std::size_t i = 0;
  while (m_env.clock () - start <= scan_time_s && !stopped ())
    {
      hop ();
      devices.merge (listen_in_parallel (m_groups[i], dwell_time_s));
      i = (i + 1) % m_groups.size ();
    }
  return devices;
}

DeviceSet
Scanner::active_multiprotocol_scan (const ChannelList& channels, const ChannelList& probeChannels,
                                    const ScanParams& params, Hz bandwidth)
{
  validate (params);
  const double start = m_env.clock ();
  DeviceSet devices;
  ChannelList merged = channels;
  if (!probeChannels.empty ())
    {
      ProbeResult probed = probe_channels (probeChannels, params.probe_dwell_time_s);
      devices = std::move (probed.devices);
      for (const auto& ch : probed.active_channels)
        {
          if (std::find (merged.begin (), merged.end (), ch) == merged.end ())
            merged.push_back (ch);
        }
    }
  if (merged.empty ())
    return devices;
  sort_ascending (merged);
  const double remaining = params.scan_time_s - (m_env.clock () - start);
  devices.merge (multiprotocol_scan (merged, params.dwell_time_s, remaining, bandwidth));
  return devices;
}

} // namespace iotscan
