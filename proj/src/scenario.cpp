#include "iotscan/scenario.hpp"

#include "iotscan/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace iotscan {

std::string_view
to_string (Algorithm algorithm)
{
  switch (algorithm)
    {
    case Algorithm::Passive:
      return "passive";
    case Algorithm::Active:
      return "active";
    case Algorithm::Multiprotocol:
      return "multiprotocol";
    case Algorithm::ActiveMultiprotocol:
      return "active_multiprotocol";
    case Algorithm::Sequential:
      return "sequential";
    }
  return "unknown";
}

std::optional<Algorithm>
parse_algorithm (std::string_view name)
{
  for (auto a : {Algorithm::Passive, Algorithm::Active, Algorithm::Multiprotocol, Algorithm::ActiveMultiprotocol,
                 Algorithm::Sequential})
    {
      if (to_string (a) == name)
        return a;
    }
  return std::nullopt;
}

namespace {

constexpr int kMaxIncludeDepth = 8;

class Parser
{
public:
  explicit Parser (ScenarioConfig& config)
    : m_config (config)
  {
  }

  void parse (std::istream& is, const std::filesystem::path& baseDir, const std::string& source, int depth)
  {
    if (depth > kMaxIncludeDepth)
      throw ScenarioError ("include", source + ": includes nested too deeply");
    std::string line;
    int lineNo = 0;
    while (std::getline (is, line))
      {
        ++lineNo;
        m_where = source + ":" + std::to_string (lineNo);
        if (auto hash = line.find ('#'); hash != std::string::npos)
          line.erase (hash);
        std::istringstream ls (line);
        std::vector<std::string> tok;
        for (std::string t; ls >> t;)
          tok.push_back (t);
        if (tok.empty ())
          continue;
        if (tok[0] == "include")
          {
            expect_args (tok, 1, "include");
            const auto path = baseDir / tok[1];
            std::ifstream in (path);
            if (!in)
              fail ("include", "cannot open '" + path.string () + "'");
            const std::string saved = m_where;
            parse (in, path.parent_path (), path.string (), depth + 1);
            m_where = saved;
          }
        else if (m_device)
          device_line (tok);
        else
          top_line (tok);
      }
    if (m_device && depth == 0)
      fail ("devices[" + std::to_string (m_config.devices.size ()) + "]", "device block '" + m_device->name
                                                                             + "' is missing 'end'");
  }

private:
  [[noreturn]] void fail (const std::string& path, const std::string& message) const
  {
    throw ScenarioError (path, m_where + ": " + message);
  }

  void expect_args (const std::vector<std::string>& tok, std::size_t n, const std::string& path) const
  {
    if (tok.size () != n + 1)
      fail (path, "'" + tok[0] + "' takes " + std::to_string (n) + " argument(s)");
  }

  double number (const std::string& s, const std::string& path) const
  {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars (s.data (), s.data () + s.size (), v);
    if (ec != std::errc{} || ptr != s.data () + s.size () || !std::isfinite (v))
      fail (path, "'" + s + "' is not a number");
    return v;
  }

  std::uint64_t integer (const std::string& s, const std::string& path) const
  {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars (s.data (), s.data () + s.size (), v);
    if (ec != std::errc{} || ptr != s.data () + s.size ())
      fail (path, "'" + s + "' is not a non-negative integer");
    return v;
  }

  bool boolean (const std::string& s, const std::string& path) const
  {
    if (s == "yes" || s == "true" || s == "1")
      return true;
    if (s == "no" || s == "false" || s == "0")
      return false;
    fail (path, "'" + s + "' is not yes/no");
  }

  ChannelList channels (const std::vector<std::string>& tok, const std::string& path) const
  {
    if (tok.size () < 2)
      fail (path, "'" + tok[0] + "' needs at least one channel");
    ChannelList out;
    for (std::size_t i = 1; i < tok.size (); ++i)
      {
        if (auto it = m_config.channel_defs.find (tok[i]); it != m_config.channel_defs.end ())
          {
            out.push_back (it->second);
            continue;
          }
        try
          {
            for (auto& ch : expand_channel_spec (tok[i]))
              {
                auto it = m_config.channel_defs.find (ch.label);
                out.push_back (it != m_config.channel_defs.end () ? it->second : ch);
              }
          }
        catch (const Error& e)
          {
            fail (path, e.what ());
          }
      }
    return out;
  }

  void top_line (const std::vector<std::string>& tok)
  {
    const std::string& key = tok[0];
    auto& c = m_config;
    if (key == "device")
      {
        expect_args (tok, 1, "devices");
        m_device.emplace ();
        m_device->name = tok[1];
        m_haveProtocol = false;
        return;
      }
    if (key == "channels")
      c.channels = channels (tok, key);
    else if (key == "probe_channels")
      c.probe_channels = channels (tok, key);
    else if (key == "phase")
      c.phases.push_back (channels (tok, "phases[" + std::to_string (c.phases.size ()) + "]"));
    else if (key == "channel_def")
      {
        // channel_def <label> <protocol> <center_hz> <bandwidth_hz>
        expect_args (tok, 4, key);
        auto protocol = parse_protocol (tok[2]);
        if (!protocol)
          fail (key, "unknown protocol '" + tok[2] + "'");
        try
          {
            c.channel_defs[tok[1]] = Channel::make (static_cast<Hz> (integer (tok[3], key)),
                                                    static_cast<Hz> (integer (tok[4], key)), *protocol, tok[1]);
          }
        catch (const DomainError& e)
          {
            fail (key, e.what ());
          }
      }
    else
      {
        expect_args (tok, 1, key);
        const std::string& v = tok[1];
        if (key == "name")
          c.name = v;
        else if (key == "algorithm")
          {
            auto a = parse_algorithm (v);
            if (!a)
              fail (key, "unknown algorithm '" + v + "'");
            c.algorithm = *a;
          }
        else if (key == "dwell")
          c.params.dwell_time_s = number (v, key);
        else if (key == "probe_dwell")
          c.params.probe_dwell_time_s = number (v, key);
        else if (key == "scan_time")
          c.params.scan_time_s = number (v, key);
        else if (key == "trials")
          c.trials = integer (v, key);
        else if (key == "alpha")
          c.alpha = number (v, key);
        else if (key == "seed")
          c.seed = integer (v, key);
        else if (key == "loss_prob")
          c.loss_prob = number (v, key);
        else if (key == "bandwidth_hz")
          c.sdr.instantaneous_bandwidth_hz = static_cast<Hz> (integer (v, key));
        else if (key == "retune_latency")
          c.sdr.retune_latency_s = number (v, key);
        else if (key == "delta_t")
          c.delta_t_s = number (v, key);
        else if (key == "max_multi_arrival")
          c.max_multi_arrival = number (v, key);
        else if (key == "time_scale")
          c.time_scale = number (v, key);
        else if (key == "probe_response_delay_max")
          c.probe_response_delay_max_s = number (v, key);
        else if (key == "lora_id_index")
          c.address_options.lora_id_index = integer (v, key);
        else if (key == "stop_when_complete")
          c.stop_when_complete = boolean (v, key);
        else
          fail (key, "unknown key");
      }
  }

  void device_line (const std::vector<std::string>& tok)
  {
    const std::string& key = tok[0];
    const std::string path = "devices[" + std::to_string (m_config.devices.size ()) + "]." + key;
    DeviceSpec& d = *m_device;
    if (key == "end")
      {
        if (!m_haveProtocol)
          fail (path, "device '" + d.name + "' has no protocol");
        m_config.devices.push_back (std::move (d));
        m_device.reset ();
        return;
      }
    if (key == "channels")
      {
        d.channels = channels (tok, path);
        return;
      }
    if (key == "address" || key == "alias")
      {
        expect_args (tok, 2, path);
        DeviceAddress a;
        try
          {
            a = parse_device_address (tok[1], tok[2]);
          }
        catch (const Error& e)
          {
            fail (path, e.what ());
          }
        if (key == "address")
          d.address = a;
        else
          d.aliases.push_back (a);
        return;
      }
    expect_args (tok, 1, path);
    const std::string& v = tok[1];
    if (key == "protocol")
      {
        auto p = parse_protocol (v);
        if (!p)
          fail (path, "unknown protocol '" + v + "'");
        d.protocol = *p;
        m_haveProtocol = true;
      }
    else if (key == "role")
      {
        auto r = parse_role (v);
        if (!r)
          fail (path, "unknown role '" + v + "'");
        d.role = *r;
      }
    else if (key == "mean_interarrival")
      d.mean_interarrival_s = number (v, path);
    else if (key == "responds_to_probe")
      d.responds_to_probe = boolean (v, path);
    else if (key == "mode")
      {
        if (v == "poisson")
          d.mode = EmitterMode::Poisson;
        else if (v == "periodic")
          d.mode = EmitterMode::Periodic;
        else
          fail (path, "unknown emitter mode '" + v + "'");
      }
    else
      fail (path, "unknown device key");
  }

  ScenarioConfig& m_config;
  std::optional<DeviceSpec> m_device;
  bool m_haveProtocol = false;
  std::string m_where;
};

bool
contains (const ChannelList& list, const Channel& ch)
{
  return std::find (list.begin (), list.end (), ch) != list.end ();
}

std::string
num (double v)
{
  char buf[40];
  std::snprintf (buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string
labels (const ChannelList& list)
{
  std::string out;
  for (const auto& ch : list)
    out += " " + ch.label + "@" + std::to_string (ch.center_hz) + "/" + std::to_string (ch.bandwidth_hz);
  return out;
}

} // namespace

ScenarioConfig
parse_scenario (std::istream& is, const std::filesystem::path& baseDir, const std::string& sourceName)
{
  ScenarioConfig config;
  Parser parser (config);
  parser.parse (is, baseDir, sourceName, 0);
  return config;
}

ScenarioConfig
load_scenario (const std::filesystem::path& path)
{
  std::ifstream in (path);
  if (!in)
    throw ScenarioError ("", "cannot open scenario file '" + path.string () + "'");
  return parse_scenario (in, path.parent_path (), path.string ());
}

RadioScenario
radio_scenario (const ScenarioConfig& config)
{
  RadioScenario s;
  s.devices = config.devices;
  for (auto& d : s.devices)
    d.mean_interarrival_s /= config.time_scale;
  s.loss_prob = config.loss_prob;
  s.probe_response_delay_max_s = config.probe_response_delay_max_s;
  s.address_options = config.address_options;
  return s;
}

std::vector<Diagnostic>
validate (const ScenarioConfig& config)
{
  const auto& c = config;
  if (c.trials < 1)
    throw ScenarioError ("trials", "need at least one trial");
  if (!(c.alpha > 0.0 && c.alpha < 1.0))
    throw ScenarioError ("alpha", "must lie in (0, 1)");
  if (!(c.delta_t_s > 0.0))
    throw ScenarioError ("delta_t", "must be positive");
  if (!(c.max_multi_arrival > 0.0 && c.max_multi_arrival <= 1.0))
    throw ScenarioError ("max_multi_arrival", "must lie in (0, 1]");
  if (!(c.time_scale > 0.0) || !std::isfinite (c.time_scale))
    throw ScenarioError ("time_scale", "must be positive");
  try
    {
      validate (c.params);
    }
  catch (const ParameterError& e)
    {
      throw ScenarioError ("params", e.what ());
    }
  try
    {
      validate (c.sdr);
    }
  catch (const ParameterError& e)
    {
      throw ScenarioError ("sdr", e.what ());
    }

  switch (c.algorithm)
    {
    case Algorithm::Passive:
    case Algorithm::Active:
    case Algorithm::Multiprotocol:
      if (c.channels.empty ())
        throw ScenarioError ("channels", std::string (to_string (c.algorithm)) + " scan needs a channel list");
      break;
    case Algorithm::ActiveMultiprotocol:
      if (c.channels.empty () && c.probe_channels.empty ())
        throw ScenarioError ("channels", "active_multiprotocol scan needs channels or probe_channels");
      break;
    case Algorithm::Sequential:
      if (c.phases.empty ())
        throw ScenarioError ("phases", "sequential scan needs at least one phase");
      break;
    }
  const ChannelList& probed = c.algorithm == Algorithm::Active ? c.channels : c.probe_channels;
  if (c.algorithm == Algorithm::Active || c.algorithm == Algorithm::ActiveMultiprotocol)
    {
      for (const auto& ch : probed)
        {
          if (ch.protocol != Protocol::Zigbee)
            throw ScenarioError (c.algorithm == Algorithm::Active ? "channels" : "probe_channels",
                                 "cannot probe " + ch.label + ": only Zigbee channels answer probes");
        }
    }

  validate (radio_scenario (c));

  ChannelList scanned = c.channels;
  scanned.insert (scanned.end (), c.probe_channels.begin (), c.probe_channels.end ());
  for (const auto& phase : c.phases)
    scanned.insert (scanned.end (), phase.begin (), phase.end ());
  std::vector<Diagnostic> warnings;
  for (std::size_t i = 0; i < c.devices.size (); ++i)
    {
      const auto& d = c.devices[i];
      if (std::none_of (d.channels.begin (), d.channels.end (), [&] (const Channel& ch) { return contains (scanned, ch); }))
        {
          warnings.push_back ({"devices[" + std::to_string (i) + "].channels",
                               "device '" + d.name + "' is on no scanned channel and cannot be discovered"});
        }
    }
  return warnings;
}

std::string
canonical_text (const ScenarioConfig& c)
{
  std::ostringstream os;
  os << "name " << c.name << "\n"
     << "algorithm " << to_string (c.algorithm) << "\n"
     << "channels" << labels (c.channels) << "\n"
     << "probe_channels" << labels (c.probe_channels) << "\n";
  for (const auto& phase : c.phases)
    os << "phase" << labels (phase) << "\n";
  os << "dwell " << num (c.params.dwell_time_s) << "\n"
     << "probe_dwell " << num (c.params.probe_dwell_time_s) << "\n"
     << "scan_time " << num (c.params.scan_time_s) << "\n"
     << "bandwidth_hz " << c.sdr.instantaneous_bandwidth_hz << "\n"
     << "retune_latency " << num (c.sdr.retune_latency_s) << "\n"
     << "trials " << c.trials << "\n"
     << "alpha " << num (c.alpha) << "\n"
     << "seed " << c.seed << "\n"
     << "loss_prob " << num (c.loss_prob) << "\n"
     << "probe_response_delay_max " << num (c.probe_response_delay_max_s) << "\n"
     << "lora_id_index " << c.address_options.lora_id_index << "\n"
     << "delta_t " << num (c.delta_t_s) << "\n"
     << "max_multi_arrival " << num (c.max_multi_arrival) << "\n"
     << "time_scale " << num (c.time_scale) << "\n"
     << "stop_when_complete " << c.stop_when_complete << "\n";
  for (const auto& d : c.devices)
    {
      os << "device " << d.name << " " << to_string (d.protocol) << " " << to_string (d.role) << " "
         << num (d.mean_interarrival_s) << " " << (d.mode == EmitterMode::Poisson ? "poisson" : "periodic") << " "
         << d.responds_to_probe << " [" << to_string (d.address) << "]";
      for (const auto& a : d.aliases)
        os << " [" << to_string (a) << "]";
      os << labels (d.channels) << "\n";
    }
  return os.str ();
}

std::uint64_t
fnv1a64 (std::string_view text)
{
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text)
    {
      h ^= ch;
      h *= 0x100000001b3ull;
    }
  return h;
}

} // namespace iotscan
