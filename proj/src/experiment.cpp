#include "iotscan/experiment.hpp"

#include "iotscan/errors.hpp"
#include "iotscan/random.hpp"

#include <boost/version.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#ifndef IOTSCAN_VERSION
#define IOTSCAN_VERSION "0.0.0"
#endif

namespace iotscan {

namespace {

bool
audible_on (const DeviceSpec& device, const ChannelList& slot)
{
  return std::any_of (device.channels.begin (), device.channels.end (), [&] (const Channel& ch) {
    return std::find (slot.begin (), slot.end (), ch) != slot.end ();
  });
}

ChannelList
sorted (ChannelList list)
{
  sort_ascending (list);
  return list;
}

/// Channels of `candidates` that host at least one device answering probes.
ChannelList
responding_channels (const ScenarioConfig& config, const ChannelList& candidates)
{
  ChannelList out;
  for (const auto& ch : candidates)
    {
      for (const auto& d : config.devices)
        {
          if (d.responds_to_probe && audible_on (d, ChannelList{ch}))
            {
              out.push_back (ch);
              break;
            }
        }
    }
  return out;
}

} // namespace

TrialResult
run_trial (const ScenarioConfig& config, Environment& env)
{
  const std::size_t N = config.devices.size ();
  Scanner scanner (env, config.sdr);
  if (config.stop_when_complete)
    scanner.set_stop_condition ([N] (const DiscoveryLog& log) { return log.first_seen.size () >= N; });

  const auto& p = config.params;
  const Hz bw = config.sdr.instantaneous_bandwidth_hz;
  switch (config.algorithm)
    {
    case Algorithm::Passive:
      scanner.passive_scan (config.channels, p.dwell_time_s, p.scan_time_s);
      break;
    case Algorithm::Active:
      scanner.active_scan (config.channels, p);
      break;
    case Algorithm::Multiprotocol:
      scanner.multiprotocol_scan (sorted (config.channels), p.dwell_time_s, p.scan_time_s, bw);
      break;
    case Algorithm::ActiveMultiprotocol:
      scanner.active_multiprotocol_scan (config.channels, config.probe_channels, p, bw);
      break;
    case Algorithm::Sequential:
      for (const auto& phase : config.phases)
        {
          std::vector<DeviceId> targets;
          for (std::size_t i = 0; i < N; ++i)
            {
              if (audible_on (config.devices[i], phase))
                targets.push_back (DeviceId{static_cast<std::uint32_t> (i)});
            }
          // A phase ends once everything it can hear has been found.
          scanner.set_stop_condition ([targets, N, all = config.stop_when_complete] (const DiscoveryLog& log) {
            if (all && log.first_seen.size () >= N)
              return true;
            return std::all_of (targets.begin (), targets.end (),
                                [&] (DeviceId id) { return log.first_seen.contains (id); });
          });
          const double remaining = p.scan_time_s - scanner.elapsed ();
          if (remaining < 0.0)
            break;
          scanner.passive_scan (phase, p.dwell_time_s, remaining);
        }
      break;
    }

  TrialResult result;
  result.first_seen.assign (N, std::nullopt);
  for (const auto& [id, t] : scanner.log ().first_seen)
    result.first_seen.at (id.value) = t;
  result.scan_duration_s = scanner.elapsed ();
  return result;
}

ExperimentResult
run_experiment (const ScenarioConfig& config, const RunOptions& options)
{
  validate (config);
  const auto t0 = std::chrono::steady_clock::now ();
  const RadioScenario radio = radio_scenario (config);

  ExperimentResult result;
  result.trials.resize (config.trials);
  std::vector<std::exception_ptr> errors (config.trials);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t m = next++; m < config.trials; m = next++)
      {
        try
          {
            Environment env (radio, derive_seed (config.seed, m));
            const bool logging = options.event_log_trial == m && options.event_log;
            env.set_logging (logging);
            result.trials[m] = run_trial (config, env);
            if (logging)
              *options.event_log = env.event_log ();
          }
        catch (...)
          {
            errors[m] = std::current_exception ();
          }
      }
  };

  unsigned threads = options.threads ? options.threads : std::thread::hardware_concurrency ();
  threads = std::clamp<unsigned> (threads, 1, static_cast<unsigned> (config.trials));
  if (threads == 1)
    worker ();
  else
    {
      std::vector<std::jthread> pool;
      for (unsigned k = 0; k < threads; ++k)
        pool.emplace_back (worker);
    }
  for (auto& e : errors)
    {
      if (e)
        std::rethrow_exception (e);
    }

  std::vector<TrialTimes> times;
  for (const auto& t : result.trials)
    times.push_back (t.first_seen);
  if (!config.devices.empty ())
    result.summary = summarize (times, config.alpha);
  result.summary.alpha = config.alpha;
  result.wall_clock_s = std::chrono::duration<double> (std::chrono::steady_clock::now () - t0).count ();
  return result;
}

ModelTable
run_model (const ScenarioConfig& config, std::optional<double> deltaT)
{
  ModelTable table;
  table.delta_t_s = deltaT.value_or (config.delta_t_s);
  if (!(table.delta_t_s > 0.0))
    throw ParameterError ("delta_t must be positive");
  if (config.devices.empty ())
    return table;

  std::vector<ChannelList> slots;
  const Hz bw = config.sdr.instantaneous_bandwidth_hz;
  switch (config.algorithm)
    {
    case Algorithm::Passive:
      for (const auto& ch : config.channels)
        slots.push_back ({ch});
      break;
    case Algorithm::Active:
      for (const auto& ch : responding_channels (config, config.channels))
        slots.push_back ({ch});
      break;
    case Algorithm::Multiprotocol:
      slots = partition_channels (sorted (config.channels), bw);
      break;
    case Algorithm::ActiveMultiprotocol:
      {
        ChannelList merged = config.channels;
        for (const auto& ch : responding_channels (config, config.probe_channels))
          {
            if (std::find (merged.begin (), merged.end (), ch) == merged.end ())
              merged.push_back (ch);
          }
        if (!merged.empty ())
          slots = partition_channels (sorted (merged), bw);
        break;
      }
    case Algorithm::Sequential:
      throw ModelError (ModelError::Kind::Unsupported, "no analytic model for sequential scans");
    }

  std::vector<double> rates;
  for (const auto& d : config.devices)
    {
      const auto audible = std::count_if (slots.begin (), slots.end (),
                                          [&] (const ChannelList& slot) { return audible_on (d, slot); });
      if (audible == 0)
        throw ModelError (ModelError::Kind::Degenerate, "device '" + d.name + "' is never listened to");
      table.channel_divisors.push_back (static_cast<double> (slots.size ()) / static_cast<double> (audible));
      rates.push_back (config.time_scale / d.mean_interarrival_s);
    }

  ProbabilityVector pv;
  try
    {
      pv = discretize (rates, table.delta_t_s, table.channel_divisors, config.max_multi_arrival);
    }
  catch (const ModelError& e)
    {
      if (e.kind () != ModelError::Kind::DeltaTooCoarse)
        throw;
      throw ModelError (e.kind (), std::string (e.what ()) + "; use a smaller delta_t or raise max_multi_arrival");
    }
  table.expected_s = expected_order_statistics (pv);
  return table;
}

CompareReport
compare (const OrderStatSummary& summary, const ModelTable& model)
{
  if (summary.rows.size () != model.expected_s.size ())
    throw ParameterError ("compare: summary has " + std::to_string (summary.rows.size ()) + " rows, model "
                          + std::to_string (model.expected_s.size ()));
  CompareReport report;
  for (std::size_t k = 0; k < summary.rows.size (); ++k)
    {
      CompareRow row{summary.rows[k], model.expected_s[k], false};
      const auto& r = row.empirical;
      row.in_ci = !r.censored () && std::isfinite (r.ci_halfwidth_s) && r.ci_lo () <= row.expected_s
                  && row.expected_s <= r.ci_hi ();
      report.in_ci_count += row.in_ci;
      report.rows.push_back (row);
    }
  report.passed = 4 * report.in_ci_count >= 3 * report.rows.size ();
  return report;
}

std::string
dissect (Protocol protocol, std::string_view hex, const DecodeOptions& options, const AddressOptions& addressOptions)
{
  const Bytes bytes = from_hex (hex);
  const DecodedFrame frame = decode (protocol, bytes, options);
  std::ostringstream os;
  os << describe (frame) << "\n"
     << "address: " << to_string (extract_address (frame, addressOptions)) << "\n";
  return os.str ();
}

std::string
format_value (double v)
{
  if (!std::isfinite (v))
    return "nan";
  char buf[64];
  std::snprintf (buf, sizeof buf, "%.6f", v);
  return buf;
}

void
write_trials_csv (std::ostream& os, const ScenarioConfig& config, const ExperimentResult& result)
{
  os << "trial,n,first_seen_s,device\n";
  for (std::size_t m = 0; m < result.trials.size (); ++m)
    {
      const auto& fs = result.trials[m].first_seen;
      std::vector<std::size_t> order (fs.size ());
      std::iota (order.begin (), order.end (), 0);
      std::stable_sort (order.begin (), order.end (), [&] (std::size_t a, std::size_t b) {
        if (fs[a].has_value () != fs[b].has_value ())
          return fs[a].has_value ();
        return fs[a] && *fs[a] < *fs[b];
      });
      std::size_t n = 0;
      for (std::size_t i : order)
        {
          os << m << ",";
          if (fs[i])
            os << ++n << "," << format_value (*fs[i]);
          else
            os << ",";
          os << "," << config.devices[i].name << "\n";
        }
    }
}

void
write_summary_csv (std::ostream& os, const OrderStatSummary& summary)
{
  os << "n,mean_s,ci_lo_s,ci_hi_s,censored_count\n";
  for (const auto& r : summary.rows)
    {
      os << r.n << "," << format_value (r.mean_s) << "," << format_value (r.ci_lo ()) << ","
         << format_value (r.ci_hi ()) << "," << r.censored_count << "\n";
    }
}

void
write_model_csv (std::ostream& os, const ModelTable& model)
{
  os << "n,expected_time_s\n";
  for (std::size_t k = 0; k < model.expected_s.size (); ++k)
    os << k + 1 << "," << format_value (model.expected_s[k]) << "\n";
}

void
write_compare_csv (std::ostream& os, const CompareReport& report)
{
  os << "n,mean_s,ci_lo_s,ci_hi_s,expected_time_s,in_ci,censored_count\n";
  for (const auto& row : report.rows)
    {
      const auto& r = row.empirical;
      os << r.n << "," << format_value (r.mean_s) << "," << format_value (r.ci_lo ()) << ","
         << format_value (r.ci_hi ()) << "," << format_value (row.expected_s) << "," << (row.in_ci ? 1 : 0) << ","
         << r.censored_count << "\n";
    }
}

std::string
version_string ()
{
  return IOTSCAN_VERSION;
}

void
write_manifest (std::ostream& os, const ScenarioConfig& config, const std::string& command)
{
  char hash[32];
  std::snprintf (hash, sizeof hash, "%016llx",
                 static_cast<unsigned long long> (fnv1a64 (canonical_text (config))));
  os << "command " << command << "\n"
     << "scenario " << config.name << "\n"
     << "config_hash fnv1a64:" << hash << "\n"
     << "seed " << config.seed << "\n"
     << "trials " << config.trials << "\n"
     << "algorithm " << to_string (config.algorithm) << "\n"
     << "iotscan_version " << version_string () << "\n"
     << "compiler " << __VERSION__ << "\n"
     << "boost_version " << BOOST_VERSION / 100000 << "." << BOOST_VERSION / 100 % 1000 << "." << BOOST_VERSION % 100
     << "\n";
}

} // namespace iotscan
