#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "iotscan/errors.hpp"
#include "iotscan/radio_sim.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

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

std::vector<double>
emission_times (const RadioScenario& s, std::uint64_t seed, const Channel& ch, double horizon)
{
  Environment env (s, seed);
  std::vector<double> t;
  for (const auto& e : env.emissions_in (ch, 0.0, horizon))
    t.push_back (e.time_s);
  return t;
}

std::string
log_text (const RadioScenario& s, std::uint64_t seed)
{
  Environment env (s, seed);
  const auto all = zigbee_channels ();
  for (int w = 0; w < 200; ++w)
    env.emissions_in (all[w % all.size ()], w * 1.0, w * 1.0 + 1.0);
  std::ostringstream os;
  write_event_log_csv (os, env);
  return os.str ();
}

RadioScenario
small_zigbee ()
{
  RadioScenario s;
  s.devices = {zigbee ("coord", 11, 2.0, 0x1A2B, 0x0000, DeviceRole::Coordinator),
               zigbee ("lamp-a", 11, 3.0, 0x1A2B, 0x0001), zigbee ("lamp-b", 11, 4.0, 0x1A2B, 0x0002),
               zigbee ("plug", 15, 1.5, 0x2222, 0x0007)};
  return s;
}

} // namespace

TEST_CASE ("empty environment emits nothing")
{
  Environment env (RadioScenario{}, 1);
  CHECK (env.device_count () == 0);
  CHECK (env.emissions_in (zigbee_channels (), 0.0, 1e6).empty ());
}

TEST_CASE ("event log is a function of scenario and seed")
{
  const auto s = small_zigbee ();
  const std::string a = log_text (s, 42);
  CHECK (a == log_text (s, 42));
  CHECK (a != log_text (s, 43));
  CHECK (a.find ("zigbee-11") != std::string::npos);
}

TEST_CASE ("emission sequence does not depend on how it is sampled")
{
  const auto s = small_zigbee ();
  const Channel ch = zigbee_channel (11);
  Environment whole (s, 5);
  const auto all = whole.emissions_in (ch, 0.0, 100.0);

  Environment pieces (s, 5);
  std::vector<Emission> joined;
  for (int k = 0; k < 100; ++k)
    {
      // skip odd windows entirely, and listen to a different channel in between
      if (k % 2)
        pieces.emissions_in (zigbee_channel (15), k, k + 1.0);
      else
        for (auto& e : pieces.emissions_in (ch, k, k + 1.0))
          joined.push_back (e);
    }
  std::vector<Emission> even;
  for (const auto& e : all)
    if (static_cast<int> (e.time_s) % 2 == 0)
      even.push_back (e);
  REQUIRE (joined.size () == even.size ());
  for (std::size_t i = 0; i < even.size (); ++i)
    {
      CHECK (joined[i].time_s == even[i].time_s);
      CHECK (joined[i].frame == even[i].frame);
    }
}

TEST_CASE ("exponential inter-arrivals")
{
  RadioScenario s;
  s.devices = {zigbee ("d", 11, 2.0, 1, 1)};
  const auto t = emission_times (s, 7, zigbee_channel (11), 1e6);
  REQUIRE (t.size () > 10000);
  std::vector<double> gaps;
  for (std::size_t i = 1; i < t.size (); ++i)
    gaps.push_back (t[i] - t[i - 1]);
  double mean = 0.0;
  for (double g : gaps)
    mean += g;
  mean /= static_cast<double> (gaps.size ());
  CHECK (std::abs (mean - 2.0) / 2.0 < 0.01);

  // Kolmogorov-Smirnov against Exp(mean 2), alpha 0.01
  std::sort (gaps.begin (), gaps.end ());
  const double n = static_cast<double> (gaps.size ());
  double d = 0.0;
  for (std::size_t i = 0; i < gaps.size (); ++i)
    {
      const double cdf = 1.0 - std::exp (-gaps[i] / 2.0);
      d = std::max ({d, cdf - i / n, (i + 1) / n - cdf});
    }
  CHECK (d < 1.6276 / std::sqrt (n));
}

TEST_CASE ("periodic emitter")
{
  RadioScenario s;
  auto d = zigbee ("meter", 11, 10.0, 1, 1);
  d.mode = EmitterMode::Periodic;
  s.devices = {d};
  const auto t = emission_times (s, 3, zigbee_channel (11), 1000.0);
  REQUIRE (t.size () >= 99);
  CHECK (t.front () < 10.0);
  for (std::size_t i = 1; i < t.size (); ++i)
    CHECK (t[i] - t[i - 1] == doctest::Approx (10.0));
}

TEST_CASE ("channel filtering and loss")
{
  auto s = small_zigbee ();
  Environment env (s, 1);
  CHECK (env.emissions_in (zigbee_channel (26), 0.0, 1000.0).empty ());

  s.loss_prob = 1.0;
  Environment deaf (s, 1);
  CHECK (deaf.emissions_in (zigbee_channels (), 0.0, 1000.0).empty ());
  CHECK (deaf.inject_probe (zigbee_channel (11), 1000.0).empty ());
}

TEST_CASE ("per-window counts have the Poisson mean")
{
  RadioScenario s;
  s.devices = {zigbee ("d", 20, 0.5, 1, 1)};
  Environment env (s, 11);
  const int windows = 20000;
  double sum = 0.0;
  for (int w = 0; w < windows; ++w)
    sum += static_cast<double> (env.emissions_in (zigbee_channel (20), w, w + 1.0).size ());
  const double mean = sum / windows;
  // lambda = 2 per window; standard error sqrt(2 / 20000)
  CHECK (std::abs (mean - 2.0) < 3.0 * std::sqrt (2.0 / windows));
}

TEST_CASE ("superposition on a shared channel")
{
  RadioScenario s;
  const double mus[] = {1.0, 2.5, 4.0, 7.0};
  double rate = 0.0;
  for (int i = 0; i < 4; ++i)
    {
      s.devices.push_back (zigbee ("d" + std::to_string (i), 15, mus[i], 5, static_cast<std::uint16_t> (i + 1)));
      rate += 1.0 / mus[i];
    }
  const double T = 50000.0;
  const double count = static_cast<double> (emission_times (s, 9, zigbee_channel (15), T).size ());
  CHECK (std::abs (count - T * rate) < 3.0 * std::sqrt (T * rate));
}

TEST_CASE ("ble advertising events hit all three channels at once")
{
  RadioScenario s;
  s.devices = {ble ("tag", 3.0, 0x665544332211)};
  Environment env (s, 4);
  const auto adv = ble_advertising_channels ();
  const auto all = env.emissions_in (adv, 0.0, 3000.0);
  REQUIRE (all.size () % 3 == 0);
  REQUIRE (!all.empty ());
  for (std::size_t i = 0; i < all.size (); i += 3)
    {
      CHECK (all[i].time_s == all[i + 1].time_s);
      CHECK (all[i].time_s == all[i + 2].time_s);
      std::vector<std::string> labels{all[i].channel.label, all[i + 1].channel.label, all[i + 2].channel.label};
      std::sort (labels.begin (), labels.end ());
      CHECK (labels == std::vector<std::string>{"ble-37", "ble-38", "ble-39"});
    }
}

TEST_CASE ("frames carry the device identity")
{
  RadioScenario s = small_zigbee ();
  s.devices[1].aliases = {ZigbeeExtended{0x00124B0000000001}};
  s.devices.push_back (ble ("tag", 2.0, 0xA1B2C3D4E5F6));
  DeviceSpec zw;
  zw.name = "lock";
  zw.protocol = Protocol::ZWave;
  zw.channels = {zwave_channels ()[1]};
  zw.mean_interarrival_s = 5.0;
  zw.address = ZWaveId{0xC0FFEE01, 0x05};
  s.devices.push_back (zw);
  DeviceSpec lr;
  lr.name = "leak";
  lr.protocol = Protocol::LoRa;
  lr.channels = {yolink_lora_channels ()[0]};
  lr.mean_interarrival_s = 5.0;
  lr.address = LoRaId{0x1234, 0x21};
  s.devices.push_back (lr);

  Environment env (s, 8);
  ChannelList every = zigbee_channels ();
  for (const auto& c : ble_advertising_channels ())
    every.push_back (c);
  every.push_back (zwave_channels ()[1]);
  every.push_back (yolink_lora_channels ()[0]);
  std::set<std::uint32_t> aliasSeen;
  for (const auto& e : env.emissions_in (every, 0.0, 2000.0))
    {
      DecodeOptions opts;
      if (e.channel.protocol == Protocol::ZWave)
        opts.zwave_check = zwave_check_for (e.channel);
      const auto addr = extract_address (decode (e.frame.protocol, e.frame.bytes, opts));
      const auto id = env.resolve (addr);
      REQUIRE (id);
      CHECK (id->value == e.device.value);
      if (std::holds_alternative<ZigbeeExtended> (addr))
        aliasSeen.insert (id->value);
    }
  // the device with an alias shows up under both identities, always resolving to itself
  CHECK (aliasSeen == std::set<std::uint32_t>{1});
}

TEST_CASE ("beacon requests: only coordinators and routers answer")
{
  auto s = small_zigbee ();
  Environment env (s, 2);
  const auto replies = env.inject_probe (zigbee_channel (11), 10.0);
  REQUIRE (replies.size () == 1);
  CHECK (replies[0].device.value == 0);
  CHECK (replies[0].time_s >= 10.0);
  CHECK (replies[0].time_s <= 10.0 + s.probe_response_delay_max_s);
  const auto beacon = std::get<ZigbeeFrame> (decode (Protocol::Zigbee, replies[0].frame.bytes));
  CHECK (beacon.type == ZigbeeFrameType::Beacon);
  CHECK (extract_address (beacon) == DeviceAddress{ZigbeeShort{0x1A2B, 0x0000}});

  // the reply is delivered by a listen window that covers it
  const auto heard = env.emissions_in (zigbee_channel (11), 10.0, 10.2);
  CHECK (std::any_of (heard.begin (), heard.end (), [&] (const Emission& e) { return e.frame == replies[0].frame; }));

  CHECK (env.inject_probe (zigbee_channel (25), 11.0).empty ());
  CHECK_THROWS_AS (env.inject_probe (ble_advertising_channels ()[0], 12.0), UnsupportedProbe);
}

TEST_CASE ("clock never runs backwards")
{
  Environment env (small_zigbee (), 1);
  env.emissions_in (zigbee_channel (11), 0.0, 5.0);
  CHECK (env.clock () == 5.0);
  CHECK_THROWS_AS (env.emissions_in (zigbee_channel (11), 4.0, 6.0), SimulationError);
  CHECK_THROWS_AS (env.emissions_in (zigbee_channel (11), 6.0, 5.5), SimulationError);
  CHECK_THROWS_AS (env.advance_to (1.0), SimulationError);
}

TEST_CASE ("scenario validation reports field paths")
{
  auto expect_path = [] (const RadioScenario& s, const std::string& path) {
    try
      {
        validate (s);
        FAIL ("accepted invalid scenario");
      }
    catch (const ScenarioError& e)
      {
        CHECK (e.field_path () == path);
      }
  };
  auto s = small_zigbee ();
  s.devices[2].address = ZigbeeShort{0x1A2B, 0x0001};
  expect_path (s, "devices[2].address");

  s = small_zigbee ();
  s.devices[1].mean_interarrival_s = 0.0;
  expect_path (s, "devices[1].mean_interarrival");

  s = small_zigbee ();
  s.devices[3].channels = {ble_advertising_channels ()[0]};
  expect_path (s, "devices[3].channels");

  s = small_zigbee ();
  s.devices[0].address = BleAdvA{1};
  expect_path (s, "devices[0].address");

  s = small_zigbee ();
  s.devices.push_back (ble ("tag", 1.0, 2));
  s.devices.back ().channels.pop_back ();
  expect_path (s, "devices[4].channels");

  s = small_zigbee ();
  s.loss_prob = 1.5;
  expect_path (s, "loss_prob");
}
