#include "iotscan/checksum.hpp"
#include "iotscan/errors.hpp"
#include "iotscan/experiment.hpp"
#include "iotscan/scanner.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace iotscan;

namespace {

Bytes
to_bytes (const py::bytes& b)
{
  const std::string s = b;
  return Bytes (s.begin (), s.end ());
}

std::vector<std::string>
channel_labels (const ChannelList& channels)
{
  std::vector<std::string> out;
  for (const auto& c : channels)
    out.push_back (c.label);
  return out;
}

} // namespace

PYBIND11_MODULE (_iotscan, m)
{
  m.doc () = "Device-discovery simulator and discovery-time model";
  m.attr ("__version__") = version_string ();

  auto error = py::register_exception<Error> (m, "Error");
  py::register_exception<ScenarioError> (m, "ScenarioError", error.ptr ());
  py::register_exception<FrameError> (m, "FrameError", error.ptr ());
  py::register_exception<ModelError> (m, "ModelError", error.ptr ());
  py::register_exception<ParameterError> (m, "ParameterError", error.ptr ());

  py::class_<ScenarioConfig> (m, "Scenario")
    .def_readonly ("name", &ScenarioConfig::name)
    .def_readwrite ("trials", &ScenarioConfig::trials)
    .def_readwrite ("seed", &ScenarioConfig::seed)
    .def_readwrite ("alpha", &ScenarioConfig::alpha)
    .def_property_readonly ("algorithm", [] (const ScenarioConfig& c) { return std::string (to_string (c.algorithm)); })
    .def_property_readonly ("device_names",
                            [] (const ScenarioConfig& c) {
                              std::vector<std::string> out;
                              for (const auto& d : c.devices)
                                out.push_back (d.name);
                              return out;
                            })
    .def_property_readonly ("channels", [] (const ScenarioConfig& c) { return channel_labels (c.channels); })
    .def_property (
      "dwell_time_s", [] (const ScenarioConfig& c) { return c.params.dwell_time_s; },
      [] (ScenarioConfig& c, double v) { c.params.dwell_time_s = v; })
    .def_property (
      "scan_time_s", [] (const ScenarioConfig& c) { return c.params.scan_time_s; },
      [] (ScenarioConfig& c, double v) { c.params.scan_time_s = v; })
    .def_property_readonly ("config_hash", [] (const ScenarioConfig& c) { return fnv1a64 (canonical_text (c)); });

  m.def ("load_scenario", &load_scenario, py::arg ("path"));

  py::class_<OrderStatRow> (m, "OrderStatRow")
    .def_readonly ("n", &OrderStatRow::n)
    .def_readonly ("mean_s", &OrderStatRow::mean_s)
    .def_readonly ("std_s", &OrderStatRow::std_s)
    .def_readonly ("ci_halfwidth_s", &OrderStatRow::ci_halfwidth_s)
    .def_readonly ("trial_count", &OrderStatRow::trial_count)
    .def_readonly ("censored_count", &OrderStatRow::censored_count)
    .def_property_readonly ("ci_lo", &OrderStatRow::ci_lo)
    .def_property_readonly ("ci_hi", &OrderStatRow::ci_hi);

  py::class_<OrderStatSummary> (m, "OrderStatSummary")
    .def_readonly ("rows", &OrderStatSummary::rows)
    .def_readonly ("alpha", &OrderStatSummary::alpha);

  py::class_<ExperimentResult> (m, "ExperimentResult")
    .def_readonly ("summary", &ExperimentResult::summary)
    .def_readonly ("wall_clock_s", &ExperimentResult::wall_clock_s)
    .def_property_readonly ("first_seen",
                            [] (const ExperimentResult& r) {
                              std::vector<TrialTimes> out;
                              for (const auto& t : r.trials)
                                out.push_back (t.first_seen);
                              return out;
                            });

  m.def (
    "run_experiment",
    [] (const ScenarioConfig& config, unsigned threads) {
      py::gil_scoped_release release;
      return run_experiment (config, RunOptions{threads, std::nullopt, nullptr});
    },
    py::arg ("scenario"), py::arg ("threads") = 0);

  py::class_<ModelTable> (m, "ModelTable")
    .def_readonly ("expected_s", &ModelTable::expected_s)
    .def_readonly ("channel_divisors", &ModelTable::channel_divisors)
    .def_readonly ("delta_t_s", &ModelTable::delta_t_s);

  m.def ("run_model", &run_model, py::arg ("scenario"), py::arg ("delta_t") = py::none ());

  py::class_<CompareRow> (m, "CompareRow")
    .def_readonly ("empirical", &CompareRow::empirical)
    .def_readonly ("expected_s", &CompareRow::expected_s)
    .def_readonly ("in_ci", &CompareRow::in_ci);

  py::class_<CompareReport> (m, "CompareReport")
    .def_readonly ("rows", &CompareReport::rows)
    .def_readonly ("in_ci_count", &CompareReport::in_ci_count)
    .def_readonly ("passed", &CompareReport::passed);

  m.def ("compare", &compare, py::arg ("summary"), py::arg ("model"));

  m.def (
    "expected_order_statistics",
    [] (const std::vector<double>& p, double p0, double deltaT) {
      ProbabilityVector pv;
      pv.p = p;
      pv.p0 = p0;
      pv.delta_t_s = deltaT;
      return expected_order_statistics (pv);
    },
    py::arg ("p"), py::arg ("p0"), py::arg ("delta_t") = 1.0);

  m.def (
    "mc_order_statistics",
    [] (const std::vector<double>& p, double p0, std::size_t episodes, std::uint64_t seed, double deltaT) {
      ProbabilityVector pv;
      pv.p = p;
      pv.p0 = p0;
      pv.delta_t_s = deltaT;
      py::gil_scoped_release release;
      return mc_order_statistics (pv, episodes, seed);
    },
    py::arg ("p"), py::arg ("p0"), py::arg ("episodes"), py::arg ("seed"), py::arg ("delta_t") = 1.0);

  m.def (
    "discretize",
    [] (const std::vector<double>& rates, double deltaT, double channelCount, double maxMultiArrival) {
      const auto pv = discretize (rates, deltaT, channelCount, maxMultiArrival);
      return py::make_tuple (pv.p, pv.p0);
    },
    py::arg ("rates"), py::arg ("delta_t") = kDefaultDeltaT, py::arg ("channel_count") = 1.0,
    py::arg ("max_multi_arrival") = kDefaultMultiArrivalThreshold);

  m.def (
    "summarize", [] (const std::vector<TrialTimes>& trials, double alpha) { return summarize (trials, alpha); },
    py::arg ("trials"), py::arg ("alpha") = 0.05);
  m.def ("t_quantile", &t_quantile, py::arg ("alpha"), py::arg ("dof"));

  m.def (
    "partition_channels",
    [] (const std::vector<std::string>& labels, Hz bandwidth) {
      ChannelList channels;
      for (const auto& l : labels)
        {
          auto c = channel_by_label (l);
          if (!c)
            throw ParameterError ("unknown channel label '" + l + "'");
          channels.push_back (*c);
        }
      sort_ascending (channels);
      std::vector<std::vector<std::string>> out;
      for (const auto& g : partition_channels (channels, bandwidth))
        out.push_back (channel_labels (g));
      return out;
    },
    py::arg ("labels"), py::arg ("bandwidth_hz"));

  m.def (
    "dissect",
    [] (const std::string& protocol, const std::string& hex) {
      const auto p = parse_protocol (protocol);
      if (!p)
        throw ParameterError ("unknown protocol '" + protocol + "'");
      return dissect (*p, hex);
    },
    py::arg ("protocol"), py::arg ("hex"));

  m.def ("crc16_802154", [] (const py::bytes& b) { return checksum::crc16_802154 (to_bytes (b)); });
  m.def ("crc24_ble", [] (const py::bytes& b) { return checksum::crc24_ble (to_bytes (b)); });
  m.def ("zwave_xor8", [] (const py::bytes& b) { return checksum::zwave_xor8 (to_bytes (b)); });
  m.def ("zwave_crc16", [] (const py::bytes& b) { return checksum::zwave_crc16 (to_bytes (b)); });
}
