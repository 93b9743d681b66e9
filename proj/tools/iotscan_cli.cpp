// iotscan: run discovery scenarios, evaluate the analytic model, dissect frames.

#include "iotscan/errors.hpp"
#include "iotscan/experiment.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

using namespace iotscan;

namespace {

struct RunArgs
{
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<double> deltaT;
  std::string out;
  std::string events;
  unsigned threads = 0;
};

const char*
frame_error_kind (FrameError::Kind kind)
{
  switch (kind)
    {
    case FrameError::Kind::Truncated:
      return "truncated frame";
    case FrameError::Kind::Checksum:
      return "checksum error";
    case FrameError::Kind::Unsupported:
      return "unsupported frame";
    case FrameError::Kind::Encode:
      return "encode error";
    }
  return "frame error";
}

ScenarioConfig
load (const RunArgs& args)
{
  ScenarioConfig config = load_scenario (args.scenario);
  if (args.seed)
    config.seed = *args.seed;
  if (args.trials)
    config.trials = *args.trials;
  if (args.deltaT)
    config.delta_t_s = *args.deltaT;
  for (const auto& w : validate (config))
    std::cerr << "warning: " << w.field_path << ": " << w.message << "\n";
  return config;
}

std::filesystem::path
out_dir (const RunArgs& args, const ScenarioConfig& config)
{
  std::filesystem::path dir = args.out.empty () ? std::filesystem::path ("results") / config.name : std::filesystem::path (args.out);
  std::filesystem::create_directories (dir);
  return dir;
}

template <typename Fn>
void
write_file (const std::filesystem::path& path, Fn&& fn)
{
  std::ofstream os (path);
  if (!os)
    throw ParameterError ("cannot write '" + path.string () + "'");
  fn (os);
}

ExperimentResult
scan (const RunArgs& args, const ScenarioConfig& config, const std::filesystem::path& dir, const char* command)
{
  RunOptions options;
  options.threads = args.threads;
  std::vector<Emission> events;
  if (!args.events.empty ())
    {
      options.event_log_trial = 0;
      options.event_log = &events;
    }
  ExperimentResult result = run_experiment (config, options);

  write_file (dir / "trials.csv", [&] (std::ostream& os) { write_trials_csv (os, config, result); });
  write_file (dir / "summary.csv", [&] (std::ostream& os) { write_summary_csv (os, result.summary); });
  write_file (dir / "manifest.txt", [&] (std::ostream& os) { write_manifest (os, config, command); });
  if (!args.events.empty ())
    {
      write_file (args.events, [&] (std::ostream& os) {
        os << "time_s,channel_label,protocol,device,frame_hex\n";
        for (const auto& e : events)
          {
            os << format_value (e.time_s) << "," << e.channel.label << "," << to_string (e.frame.protocol) << ","
               << config.devices.at (e.device.value).name << "," << to_hex (e.frame.bytes) << "\n";
          }
      });
    }
  return result;
}

int
cmd_scan (const RunArgs& args)
{
  const ScenarioConfig config = load (args);
  const auto dir = out_dir (args, config);
  const ExperimentResult result = scan (args, config, dir, "scan");
  std::printf ("%-4s %12s %12s %12s %8s\n", "n", "mean_s", "ci_lo_s", "ci_hi_s", "censored");
  for (const auto& r : result.summary.rows)
    {
      std::printf ("%-4zu %12s %12s %12s %8zu\n", r.n, format_value (r.mean_s).c_str (),
                   format_value (r.ci_lo ()).c_str (), format_value (r.ci_hi ()).c_str (), r.censored_count);
    }
  std::printf ("%zu trials, %.3f s wall clock, results in %s\n", result.trials.size (), result.wall_clock_s,
               dir.string ().c_str ());
  return 0;
}

int
cmd_model (const RunArgs& args)
{
  const ScenarioConfig config = load (args);
  const ModelTable model = run_model (config, args.deltaT);
  const auto dir = out_dir (args, config);
  write_file (dir / "model.csv", [&] (std::ostream& os) { write_model_csv (os, model); });
  write_file (dir / "manifest.txt", [&] (std::ostream& os) { write_manifest (os, config, "model"); });
  std::printf ("%-4s %16s\n", "n", "expected_time_s");
  for (std::size_t k = 0; k < model.expected_s.size (); ++k)
    std::printf ("%-4zu %16s\n", k + 1, format_value (model.expected_s[k]).c_str ());
  return 0;
}

int
cmd_compare (const RunArgs& args)
{
  const ScenarioConfig config = load (args);
  const ModelTable model = run_model (config, args.deltaT);
  const auto dir = out_dir (args, config);
  const ExperimentResult result = scan (args, config, dir, "compare");
  const CompareReport report = compare (result.summary, model);
  write_file (dir / "model.csv", [&] (std::ostream& os) { write_model_csv (os, model); });
  write_file (dir / "compare.csv", [&] (std::ostream& os) { write_compare_csv (os, report); });

  std::printf ("%-4s %12s %12s %12s %12s %6s\n", "n", "mean_s", "ci_lo_s", "ci_hi_s", "expected_s", "in_ci");
  for (const auto& row : report.rows)
    {
      const auto& r = row.empirical;
      std::printf ("%-4zu %12s %12s %12s %12s %6s\n", r.n, format_value (r.mean_s).c_str (),
                   format_value (r.ci_lo ()).c_str (), format_value (r.ci_hi ()).c_str (),
                   format_value (row.expected_s).c_str (), row.in_ci ? "yes" : "no");
    }
  std::printf ("%zu of %zu expected values inside the %.0f%% interval: %s\n", report.in_ci_count, report.rows.size (),
               100.0 * (1.0 - config.alpha), report.passed ? "PASS" : "FAIL");
  return report.passed ? 0 : 2;
}

int
cmd_dissect (const std::string& protocolName, const std::string& hex, const std::string& check,
             std::size_t loraIdIndex)
{
  const auto protocol = parse_protocol (protocolName);
  if (!protocol)
    throw ParameterError ("unknown protocol '" + protocolName + "' (zigbee, ble, lora, zwave)");
  DecodeOptions options;
  if (check == "xor")
    options.zwave_check = ZWaveCheck::Xor8;
  else if (check == "crc16")
    options.zwave_check = ZWaveCheck::Crc16;
  else if (!check.empty ())
    throw ParameterError ("--zwave-check takes xor or crc16");
  AddressOptions addressOptions;
  addressOptions.lora_id_index = loraIdIndex;
  std::cout << dissect (*protocol, hex, options, addressOptions);
  return 0;
}

} // namespace

int
main (int argc, char** argv)
{
  CLI::App app{"IoT device discovery simulator and analytics"};
  app.set_version_flag ("--version", version_string ());
  app.require_subcommand (1);

  RunArgs args;
  auto addScenario = [&] (CLI::App* sub, bool run) {
    sub->add_option ("scenario", args.scenario, "Scenario file")->required ()->check (CLI::ExistingFile);
    sub->add_option ("--out", args.out, "Output directory (default results/<name>)");
    sub->add_option ("--delta-t", args.deltaT, "Model time step in seconds");
    if (run)
      {
        sub->add_option ("--seed", args.seed, "Base seed");
        sub->add_option ("--trials", args.trials, "Number of trials");
        sub->add_option ("--events", args.events, "Write the radio events of trial 0 to this CSV");
        sub->add_option ("--threads", args.threads, "Worker threads (0 = all cores)");
      }
  };
  auto* scanCmd = app.add_subcommand ("scan", "Run the scenario's trials");
  addScenario (scanCmd, true);
  auto* modelCmd = app.add_subcommand ("model", "Expected discovery times from the analytic model");
  addScenario (modelCmd, false);
  auto* compareCmd = app.add_subcommand ("compare", "Scan, model and check the model against the intervals");
  addScenario (compareCmd, true);

  std::string protocol, hex, check;
  std::size_t loraIdIndex = AddressOptions{}.lora_id_index;
  auto* dissectCmd = app.add_subcommand ("dissect", "Decode one frame given as hex");
  dissectCmd->add_option ("protocol", protocol, "zigbee, ble, lora or zwave")->required ();
  dissectCmd->add_option ("hex", hex, "Frame bytes as hex")->required ();
  dissectCmd->add_option ("--zwave-check", check, "xor or crc16 (default: try both)");
  dissectCmd->add_option ("--lora-id-index", loraIdIndex, "Payload byte holding the LoRa device id");

  try
    {
      app.parse (argc, argv);
    }
  catch (const CLI::ParseError& e)
    {
      const int rc = app.exit (e);
      return rc == 0 ? 0 : 1;
    }

  try
    {
      if (*scanCmd)
        return cmd_scan (args);
      if (*modelCmd)
        return cmd_model (args);
      if (*compareCmd)
        return cmd_compare (args);
      return cmd_dissect (protocol, hex, check, loraIdIndex);
    }
  catch (const FrameError& e)
    {
      std::cerr << "error: " << frame_error_kind (e.kind ()) << " at byte offset " << e.offset () << ": " << e.what ()
                << "\n";
    }
  catch (const ModelError& e)
    {
      std::cerr << "model error: " << e.what () << "\n";
    }
  catch (const Error& e)
    {
      std::cerr << "error: " << e.what () << "\n";
    }
  catch (const std::filesystem::filesystem_error& e)
    {
      std::cerr << "error: " << e.what () << "\n";
    }
  return 1;
}
