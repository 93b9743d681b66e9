#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "iotscan/errors.hpp"
#include "iotscan/scanner.hpp"

#include <algorithm>
#include <cmath>

using namespace iotscan;

namespace {

DeviceSpec
zigbee (std::string name, int ch, double mu, std::uint16_t pan, std::uint16_t addr,
        DeviceRole role = DeviceRole::EndDevice)
{
  DeviceSpec d;
  d.name = std::move (name);
  d.protocol = Protocol::Zigbee;
  d.role = role;
  d.channels = {zigbee_channel (ch)};
  d.mean_interarrival_s = mu;
  d.address = ZigbeeShort{pan, addr};
  d.responds_to_probe = role == DeviceRole::Coordinator || role == DeviceRole::Router;
  return d;
}

DeviceSpec
ble (std::string name, double mu, std::uint64_t adva)
{
  DeviceSpec d;
  d.name = std::move (name);
  d.protocol = Protocol::BleAdvertising;
  d.role = DeviceRole::Peripheral;
  d.channels = ble_advertising_channels ();
  d.mean_interarrival_s = mu;
  d.address = BleAdvA{adva};
  return d;
}

/// Coordinators on 11, 15 and 20, two end-devices on each of those channels.
RadioScenario
three_networks (double coordMu = 5.0, double endMu = 8.0)
{
  RadioScenario s;
  const int chans[] = {11, 15, 20};
  for (int k = 0; k < 3; ++k)
    {
      const auto pan = static_cast<std::uint16_t> (0x1000 + k);
      s.devices.push_back (zigbee ("coord" + std::to_string (k), chans[k], coordMu, pan, 0, DeviceRole::Coordinator));
      s.devices.push_back (zigbee ("end" + std::to_string (k) + "a", chans[k], endMu, pan, 1));
      s.devices.push_back (zigbee ("end" + std::to_string (k) + "b", chans[k], endMu, pan, 2));
    }
  return s;
}

std::vector<std::string>
labels_of (const ChannelList& list)
{
  std::vector<std::string> out;
  for (const auto& ch : list)
    out.push_back (ch.label);
  return out;
}

ChannelList
adv_and (std::initializer_list<int> zigbeeChannels)
{
  ChannelList list = ble_advertising_channels ();
  for (int k : zigbeeChannels)
    list.push_back (zigbee_channel (k));
  sort_ascending (list);
  return list;
}

} // namespace

TEST_CASE ("listen")
{
  RadioScenario s;
  s.devices = {zigbee ("a", 11, 1.0, 1, 1)};
  Environment env (s, 1);
  Scanner scanner (env);
  CHECK (scanner.listen (zigbee_channel (12), 1.0).empty ());

  // one frame in the middle of the window
  RadioScenario quiet;
  Environment env2 (quiet, 1);
  Scanner s2 (env2);
  ZigbeeFrame data;
  data.src = ZigbeeSource{0x1A2B, ZigbeeShortAddress{3}};
  env2.inject_emission (Emission{0.5, zigbee_channel (11), encode (data), kExternalDevice});
  CHECK (s2.listen (zigbee_channel (11), 1.0) == DeviceSet{ZigbeeShort{0x1A2B, 3}});

  // a beacon request carries no source, so nothing is found
  env2.inject_emission (Emission{1.5, zigbee_channel (11), encode (ZigbeeFrame::beacon_request (1)), kExternalDevice});
  CHECK (s2.listen (zigbee_channel (11), 1.0).empty ());

  // corrupted frames are dropped
  Frame bad = encode (data);
  bad.bytes.back () ^= 0xFF;
  env2.inject_emission (Emission{2.5, zigbee_channel (11), bad, kExternalDevice});
  CHECK (s2.listen (zigbee_channel (11), 1.0).empty ());
}

TEST_CASE ("single channel passive scan sees an exponential first arrival")
{
  RadioScenario s;
  s.devices = {zigbee ("a", 11, 1.0, 1, 1)};
  double sum = 0.0;
  const int runs = 4000;
  for (int r = 0; r < runs; ++r)
    {
      Environment env (s, derive_seed (99, r));
      Scanner scanner (env);
      const auto found = scanner.passive_scan ({zigbee_channel (11)}, 1.0, 100.0);
      REQUIRE (found.size () == 1);
      sum += scanner.log ().first_seen.at (DeviceId{0});
    }
  // Exp(1): mean 1, standard error 1/sqrt(runs)
  CHECK (std::abs (sum / runs - 1.0) < 4.0 / std::sqrt (runs));
}

TEST_CASE ("round-robin: a device is only heard while its channel is visited")
{
  RadioScenario s;
  s.devices = {zigbee ("a", 11, 0.5, 1, 1)};
  Environment env (s, 3);
  Scanner scanner (env);
  scanner.passive_scan (zigbee_channels (), 1.0, 200.0);
  const double t = scanner.log ().first_seen.at (DeviceId{0});
  bool inside = false;
  for (const auto& v : scanner.visits ())
    {
      if (v.labels == std::vector<std::string>{"zigbee-11"} && v.t0 <= t && t < v.t1)
        inside = true;
    }
  CHECK (inside);
  // visits cycle 11, 12, ..., 26, 11, ...
  REQUIRE (scanner.visits ().size () > 17);
  CHECK (scanner.visits ()[0].labels[0] == "zigbee-11");
  CHECK (scanner.visits ()[15].labels[0] == "zigbee-26");
  CHECK (scanner.visits ()[16].labels[0] == "zigbee-11");
}

TEST_CASE ("loop bound: elapsed is checked before each window")
{
  Environment env (RadioScenario{}, 1);
  Scanner scanner (env);
  scanner.passive_scan (zigbee_channels (), 1.0, 0.5);
  CHECK (scanner.visits ().size () == 1);
  CHECK (scanner.elapsed () == 1.0);

  Environment env2 (RadioScenario{}, 1);
  Scanner s2 (env2);
  s2.passive_scan (zigbee_channels (), 1.0, 3.0);
  CHECK (s2.visits ().size () == 4);

  CHECK_THROWS_AS (s2.passive_scan ({}, 1.0, 3.0), ParameterError);
}

TEST_CASE ("retune latency is charged before every window")
{
  Environment env (RadioScenario{}, 1);
  Scanner scanner (env, SdrConfig{8 * kMHz, 0.25});
  scanner.passive_scan (zigbee_channels (), 1.0, 2.0);
  const auto& v = scanner.visits ();
  REQUIRE (v.size () == 2);
  CHECK (v[0].t0 == doctest::Approx (0.25));
  CHECK (v[1].t0 == doctest::Approx (1.5));
}

TEST_CASE ("probe_channels finds the coordinators' channels")
{
  Environment env (three_networks (), 1);
  Scanner scanner (env);
  const auto result = scanner.probe_channels (zigbee_channels (), 0.2);
  CHECK (labels_of (result.active_channels) == std::vector<std::string>{"zigbee-11", "zigbee-15", "zigbee-20"});
  CHECK (result.devices.contains (ZigbeeShort{0x1000, 0}));
  CHECK (result.devices.contains (ZigbeeShort{0x1001, 0}));
  CHECK (result.devices.contains (ZigbeeShort{0x1002, 0}));

  Environment silent (RadioScenario{}, 1);
  Scanner s2 (silent);
  const auto none = s2.probe_channels (zigbee_channels (), 0.2);
  CHECK (none.active_channels.empty ());
  CHECK (none.devices.empty ());

  auto lossy = three_networks (1e9, 1e9);
  lossy.loss_prob = 1.0;
  Environment deaf (lossy, 1);
  Scanner s3 (deaf);
  const auto lost = s3.probe_channels (zigbee_channels (), 0.2);
  CHECK (lost.active_channels.empty ());
  CHECK (lost.devices.empty ());
}

TEST_CASE ("active scan: end-devices turn up in the second phase")
{
  Environment env (three_networks (), 2);
  Scanner scanner (env);
  const auto found = scanner.active_scan (zigbee_channels (), ScanParams{1.0, 600.0, 0.2});
  CHECK (found.size () == 9);
  const double probePhase = 16 * 0.2;
  for (std::uint32_t i = 0; i < 9; ++i)
    {
      const double t = scanner.log ().first_seen.at (DeviceId{i});
      if (i % 3 != 0)
        {
          // non-responding devices can still be overheard during the probe dwell
          bool probeVisit = false;
          for (const auto& v : scanner.visits ())
            probeVisit |= v.t0 <= t && t < v.t1 && v.t1 - v.t0 < 0.5;
          CHECK ((t >= probePhase || probeVisit));
        }
    }
  // phase 2 visits only the active channels
  for (std::size_t k = 16; k < scanner.visits ().size (); ++k)
    {
      const auto& l = scanner.visits ()[k].labels[0];
      CHECK ((l == "zigbee-11" || l == "zigbee-15" || l == "zigbee-20"));
    }
}

TEST_CASE ("active scan with only routers finishes in the probe phase")
{
  RadioScenario s;
  for (int k = 0; k < 4; ++k)
    s.devices.push_back (zigbee ("r" + std::to_string (k), 11 + 3 * k, 1e6, 7, static_cast<std::uint16_t> (k),
                                 DeviceRole::Router));
  Environment env (s, 5);
  Scanner scanner (env);
  scanner.set_stop_condition ([] (const DiscoveryLog& log) { return log.first_seen.size () == 4; });
  scanner.active_scan (zigbee_channels (), ScanParams{1.0, 600.0, 0.2});
  REQUIRE (scanner.log ().first_seen.size () == 4);
  for (const auto& [id, t] : scanner.log ().first_seen)
    CHECK (t < 16 * 0.2);
}

TEST_CASE ("active scan without answers skips the second phase")
{
  RadioScenario s;
  s.devices = {zigbee ("sleepy", 11, 2.0, 1, 1)};
  Environment env (s, 5);
  Scanner scanner (env);
  scanner.active_scan (zigbee_channels (), ScanParams{1.0, 600.0, 0.2});
  CHECK (scanner.visits ().size () == 16);
  CHECK (scanner.last_active_channels ().empty ());
}

TEST_CASE ("channels in range")
{
  const Channel b37 = ble_advertising_channels ()[0];
  const Channel b39 = ble_advertising_channels ()[2];
  CHECK (labels_of (find_channels_in_range ({b37, zigbee_channel (11)}, 8 * kMHz))
         == std::vector<std::string>{"ble-37", "zigbee-11"});
  CHECK (labels_of (find_channels_in_range ({zigbee_channel (20), b39}, 8 * kMHz))
         == std::vector<std::string>{"zigbee-20"});
  const ChannelList sub1g{zwave_channels ()[0], yolink_lora_channels ()[0], zwave_channels ()[1]};
  CHECK (find_channels_in_range (sub1g, 8 * kMHz).size () == 3);
  CHECK (sub1g[2].upper_edge_hz () - sub1g[0].lower_edge_hz () == 7'670'000);

  // exactly at the limit counts as in range
  CHECK (find_channels_in_range (sub1g, 7'670'000).size () == 3);
  CHECK (find_channels_in_range (sub1g, 7'669'999).size () == 2);
  // a channel wider than the SDR still forms its own range
  CHECK (find_channels_in_range ({zigbee_channel (11)}, 1 * kMHz).size () == 1);

  CHECK_THROWS_AS (find_channels_in_range ({}, 8 * kMHz), ParameterError);
  CHECK_THROWS_AS (find_channels_in_range ({zigbee_channel (20), zigbee_channel (11)}, 8 * kMHz), ParameterError);
}

TEST_CASE ("channels in range: prefix of the input, idempotent")
{
  ChannelList all = zigbee_channels ();
  for (const auto& c : ble_advertising_channels ())
    all.push_back (c);
  sort_ascending (all);
  for (Hz bw : {1 * kMHz, 3 * kMHz, 8 * kMHz, 20 * kMHz, 100 * kMHz})
    {
      for (std::size_t start = 0; start < all.size (); ++start)
        {
          const ChannelList input (all.begin () + start, all.end ());
          const auto range = find_channels_in_range (input, bw);
          REQUIRE (!range.empty ());
          CHECK (std::equal (range.begin (), range.end (), input.begin ()));
          CHECK (find_channels_in_range (range, bw) == range);
        }
    }
}

TEST_CASE ("multiprotocol grouping of BLE advertising and active Zigbee channels")
{
  const auto groups = partition_channels (adv_and ({11, 15, 20}), 8 * kMHz);
  REQUIRE (groups.size () == 4);
  CHECK (labels_of (groups[0]) == std::vector<std::string>{"ble-37", "zigbee-11"});
  CHECK (labels_of (groups[1]) == std::vector<std::string>{"zigbee-15", "ble-38"});
  CHECK (labels_of (groups[2]) == std::vector<std::string>{"zigbee-20"});
  CHECK (labels_of (groups[3]) == std::vector<std::string>{"ble-39"});
}

TEST_CASE ("listen_in_parallel is the union of per-channel listens")
{
  RadioScenario s = three_networks (0.7, 0.9);
  s.devices.push_back (ble ("tag", 0.8, 0x665544332211));
  const ChannelList range{ble_advertising_channels ()[0], zigbee_channel (11), zigbee_channel (15)};
  for (std::uint64_t seed = 1; seed <= 20; ++seed)
    {
      Environment env (s, seed);
      Scanner par (env);
      const DeviceSet together = par.listen_in_parallel (range, 2.0);

      DeviceSet apart;
      std::size_t total = 0;
      for (const auto& ch : range)
        {
          // same seed, same emissions: a replay of the same event log per channel
          Environment replay (s, seed);
          Scanner single (replay);
          const auto found = single.listen (ch, 2.0);
          total += found.size ();
          apart.merge (DeviceSet (found));
        }
      CHECK (together == apart);
      // the channels carry disjoint device sets
      CHECK (together.size () == total);
    }

  Environment e1 (s, 3), e2 (s, 3);
  Scanner a (e1), b (e2);
  CHECK (a.listen_in_parallel ({zigbee_channel (20)}, 5.0) == b.listen (zigbee_channel (20), 5.0));
  CHECK_THROWS_AS (a.listen_in_parallel ({}, 1.0), ParameterError);
}

TEST_CASE ("multiprotocol scan with singleton groups behaves like passive scan")
{
  const RadioScenario s = three_networks (3.0, 6.0);
  const ChannelList chans{zigbee_channel (11), zigbee_channel (15), zigbee_channel (20)};
  Environment e1 (s, 8), e2 (s, 8);
  Scanner passive (e1), multi (e2);
  const auto a = passive.passive_scan (chans, 1.0, 60.0);
  const auto b = multi.multiprotocol_scan (chans, 1.0, 60.0, 2 * kMHz);
  CHECK (multi.last_groups ().size () == 3);
  CHECK (passive.visits () == multi.visits ());
  CHECK (a == b);
  CHECK (passive.log ().first_seen == multi.log ().first_seen);
}

TEST_CASE ("multiprotocol scan with one group listens continuously")
{
  RadioScenario s;
  DeviceSpec zw;
  zw.name = "lock";
  zw.protocol = Protocol::ZWave;
  zw.channels = {zwave_channels ()[0]};
  zw.mean_interarrival_s = 30.0;
  zw.address = ZWaveId{0xC0FFEE01, 2};
  s.devices.push_back (zw);
  zw.name = "siren";
  zw.channels = {zwave_channels ()[1]};
  zw.address = ZWaveId{0xC0FFEE01, 3};
  s.devices.push_back (zw);
  DeviceSpec lr;
  lr.name = "leak";
  lr.protocol = Protocol::LoRa;
  lr.channels = {yolink_lora_channels ()[0]};
  lr.mean_interarrival_s = 30.0;
  lr.address = LoRaId{0x1234, 0x21};
  s.devices.push_back (lr);

  const ChannelList chans{zwave_channels ()[0], yolink_lora_channels ()[0], zwave_channels ()[1]};
  Environment env (s, 4);
  Scanner scanner (env);
  const auto found = scanner.multiprotocol_scan (chans, 1.0, 2000.0, 8 * kMHz);
  CHECK (scanner.last_groups ().size () == 1);
  CHECK (found.size () == 3);
  for (const auto& v : scanner.visits ())
    CHECK (v.labels.size () == 3);

  // continuous listening: first-seen equals the device's first emission time
  for (std::uint32_t i = 0; i < 3; ++i)
    {
      Environment ref (s, 4);
      const auto all = ref.emissions_in (chans, 0.0, 1e6);
      const auto it = std::find_if (all.begin (), all.end (), [&] (const Emission& e) { return e.device.value == i; });
      REQUIRE (it != all.end ());
      CHECK (scanner.log ().first_seen.at (DeviceId{i}) == it->time_s);
    }
}

TEST_CASE ("active multiprotocol scan")
{
  RadioScenario s = three_networks (4.0, 6.0);
  s.devices.push_back (ble ("tag1", 3.0, 0x111111111111));
  s.devices.push_back (ble ("tag2", 5.0, 0x222222222222));
  Environment env (s, 6);
  Scanner scanner (env);
  scanner.set_stop_condition ([n = s.devices.size ()] (const DiscoveryLog& log) { return log.first_seen.size () == n; });
  scanner.active_multiprotocol_scan (ble_advertising_channels (), zigbee_channels (), ScanParams{1.0, 600.0, 0.2},
                                     8 * kMHz);
  CHECK (scanner.log ().first_seen.size () == s.devices.size ());
  const auto& g = scanner.last_groups ();
  REQUIRE (g.size () == 4);
  CHECK (labels_of (g[0]) == std::vector<std::string>{"ble-37", "zigbee-11"});
  CHECK (labels_of (g[1]) == std::vector<std::string>{"zigbee-15", "ble-38"});
  CHECK (labels_of (g[2]) == std::vector<std::string>{"zigbee-20"});
  CHECK (labels_of (g[3]) == std::vector<std::string>{"ble-39"});

  // no probe list: the same as multiprotocol_scan over the channel list
  Environment e1 (s, 6), e2 (s, 6);
  Scanner a (e1), b (e2);
  a.active_multiprotocol_scan (ble_advertising_channels (), {}, ScanParams{1.0, 50.0, 0.2}, 8 * kMHz);
  b.multiprotocol_scan (ble_advertising_channels (), 1.0, 50.0, 8 * kMHz);
  CHECK (a.visits () == b.visits ());
  CHECK (a.log ().first_seen == b.log ().first_seen);

  Environment e3 (s, 6);
  Scanner c (e3);
  CHECK_THROWS_AS (c.active_multiprotocol_scan (ble_advertising_channels (), ble_advertising_channels (),
                                                ScanParams{1.0, 50.0, 0.2}, 8 * kMHz),
                   UnsupportedProbe);
}

TEST_CASE ("discovery is monotone in scan time and sound")
{
  const RadioScenario s = three_networks (6.0, 12.0);
  DeviceSet previous;
  for (double T : {5.0, 20.0, 80.0, 320.0, 2000.0})
    {
      Environment env (s, 12);
      Scanner scanner (env);
      const auto found = scanner.passive_scan (zigbee_channels (), 1.0, T);
      CHECK (std::includes (found.begin (), found.end (), previous.begin (), previous.end ()));
      for (const auto& a : found)
        CHECK (env.resolve (a).has_value ());
      previous = found;
    }
  // horizon far beyond 20x the slowest per-visit discovery time (16 * 12 s)
  CHECK (previous.size () == 9);
}

TEST_CASE ("stop condition ends the scan without changing first-seen times")
{
  const RadioScenario s = three_networks (6.0, 12.0);
  Environment e1 (s, 21), e2 (s, 21);
  Scanner full (e1), early (e2);
  full.passive_scan (zigbee_channels (), 1.0, 3000.0);
  early.set_stop_condition ([] (const DiscoveryLog& log) { return log.first_seen.size () == 9; });
  early.passive_scan (zigbee_channels (), 1.0, 3000.0);
  CHECK (early.elapsed () < full.elapsed ());
  CHECK (early.log ().first_seen == full.log ().first_seen);
}

TEST_CASE ("scan parameter validation")
{
  CHECK_THROWS_AS (validate (ScanParams{0.0, 10.0, 0.2}), ParameterError);
  CHECK_THROWS_AS (validate (ScanParams{1.0, 0.5, 0.2}), ParameterError);
  CHECK_THROWS_AS (validate (ScanParams{1.0, 10.0, 0.0}), ParameterError);
  CHECK_THROWS_AS (validate (SdrConfig{0, 0.0}), ParameterError);
  CHECK_THROWS_AS (validate (SdrConfig{8 * kMHz, -1.0}), ParameterError);
  CHECK_NOTHROW (validate (ScanParams{}));
}
