#pragma once

#include "iotscan/channel_plan.hpp"
#include "iotscan/frame_codec.hpp"
#include "iotscan/radio_sim.hpp"

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace iotscan {

struct SdrConfig
{
  Hz instantaneous_bandwidth_hz = 8 * kMHz;
  double retune_latency_s = 0.0;
};

struct ScanParams
{
  double dwell_time_s = 1.0;
  double scan_time_s = 600.0;
  /// Listen time after each probe in the active-scan probing phase.
  double probe_dwell_time_s = 0.2;
};

void validate (const SdrConfig& sdr);
void validate (const ScanParams& params);

using DeviceSet = std::set<DeviceAddress>;

/** \brief First-seen bookkeeping, relative to the start of the scan. */
struct DiscoveryLog
{
  std::map<DeviceId, double> first_seen;
  DeviceSet addresses;
};

/// One listen window: the channels tuned and the absolute time span.
struct Visit
{
  std::vector<std::string> labels;
  double t0 = 0.0;
  double t1 = 0.0;

  bool operator== (const Visit&) const = default;
};

struct ProbeResult
{
  ChannelList active_channels;
  DeviceSet devices;
};

/**
 * All channels of an ascending list whose upper edge lies within `bandwidth`
 * of the first channel's lower edge. Always contains the first channel.
 * Throws ParameterError on an empty or unsorted list.
 */
ChannelList find_channels_in_range (const ChannelList& channels, Hz bandwidth);

/// Greedy grouping: repeated find_channels_in_range on the unscanned remainder.
std::vector<ChannelList> partition_channels (const ChannelList& channels, Hz bandwidth);

/**
 * \brief The scanning algorithms, run against one borrowed Environment.
 *
 * Time is the environment's simulated clock. Every algorithm checks the elapsed
 * time before each listen window, so the last window may end up to one dwell
 * after scan_time. An optional stop condition ends loops early once it holds;
 * windows that would have followed cannot change any first-seen time already
 * recorded.
 */
class Scanner
{
public:
  using StopCondition = std::function<bool (const DiscoveryLog&)>;

  Scanner (Environment& env, SdrConfig sdr = {});

  DeviceSet listen (const Channel& channel, double dwell_time_s);
  DeviceSet passive_scan (const ChannelList& channels, double dwell_time_s, double scan_time_s);
  ProbeResult probe_channels (const ChannelList& channels, double dwell_time_s);
  DeviceSet active_scan (const ChannelList& channels, const ScanParams& params);
  DeviceSet listen_in_parallel (const ChannelList& range, double dwell_time_s);
  DeviceSet multiprotocol_scan (const ChannelList& channels, double dwell_time_s, double scan_time_s, Hz bandwidth);
  DeviceSet active_multiprotocol_scan (const ChannelList& channels, const ChannelList& probeChannels,
                                       const ScanParams& params, Hz bandwidth);

  void set_stop_condition (StopCondition stop) { m_stop = std::move (stop); }

  const DiscoveryLog& log () const { return m_log; }
  const std::vector<Visit>& visits () const { return m_visits; }
  /// Channel groups formed by the most recent multiprotocol scan.
  const std::vector<ChannelList>& last_groups () const { return m_groups; }
  /// Active channels found by the most recent probing phase.
  const ChannelList& last_active_channels () const { return m_active; }
  double start_time () const { return m_start; }
  double elapsed () const { return m_env.clock () - m_start; }

private:
  DeviceSet observe (const ChannelList& channels, double dwell_time_s);
  void hop ();
  bool stopped () const { return m_stop && m_stop (m_log); }

  Environment& m_env;
  SdrConfig m_sdr;
  double m_start;
  DiscoveryLog m_log;
  std::vector<Visit> m_visits;
  std::vector<ChannelList> m_groups;
  ChannelList m_active;
  StopCondition m_stop;
};

} // namespace iotscan
