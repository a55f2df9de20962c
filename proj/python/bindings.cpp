#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "bansim/cli.hpp"
#include "bansim/efficiency.hpp"
#include "bansim/error.hpp"
#include "bansim/kasami.hpp"
#include "bansim/ppdu.hpp"
#include "bansim/scenario.hpp"
#include "bansim/sim.hpp"

namespace py = pybind11;
using namespace bansim;

namespace {

const PhyRegistry& registry() {
  static const auto r = PhyRegistry::from_environment();
  return r;
}

py::dict stats_dict(const NodeStats& n) {
  py::dict d;
  d["node"] = n.node;
  d["offered"] = n.offered;
  d["delivered"] = n.delivered;
  d["failed"] = n.failed;
  d["overflow"] = n.overflow;
  d["collided"] = n.collided;
  d["attempts"] = n.attempts;
  d["queued"] = n.queued;
  d["payload_bits"] = n.payload_bits;
  d["efficiency"] = n.efficiency;
  d["mean_access_delay_us"] = n.mean_access_delay_us;
  d["busy_us"] = n.busy_us;
  d["idle_us"] = n.idle_us;
  return d;
}

MacTimingConstants timing(std::int64_t psifs, std::int64_t slot, std::int64_t guard) {
  MacTimingConstants t{Micros{psifs}, Micros{slot}, Micros{guard}};
  t.validate();
  return t;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Body area network PHY/MAC simulator core";

  py::register_exception<Error>(m, "BansimError", PyExc_RuntimeError);

  m.def("config_names", [] {
    std::vector<std::string> names;
    for (const auto& c : registry().configs()) names.push_back(c.name);
    return names;
  });
  m.def("table_names", [] {
    std::vector<std::string> names;
    for (const auto& c : rate_table_configs()) names.push_back(c.name);
    return names;
  });
  m.def("data_rate", [](const std::string& name) { return row_rate(registry().find(name)); }, py::arg("config"));
  m.def("rates_csv", [] { return phy_configs_to_csv(registry().configs()); });

  m.def(
      "efficiency",
      [](const std::string& name, int payload, std::int64_t psifs, std::int64_t slot, std::int64_t guard,
         int priority) {
        return analytic_efficiency(payload, registry().find(name), timing(psifs, slot, guard),
                                   default_priority(priority));
      },
      py::arg("config"), py::arg("payload"), py::arg("psifs_us") = 20, py::arg("slot_us") = 40,
      py::arg("guard_us") = 85, py::arg("priority") = kHighestUserPriority);
  m.def(
      "efficiency_curve",
      [](const std::string& name, int from, int to) {
        const std::vector<PhyConfig> one{registry().find(name)};
        std::vector<double> out;
        for (const auto& p : sweep(one, from, to)) out.push_back(p.efficiency);
        return out;
      },
      py::arg("config"), py::arg("payload_from") = 1, py::arg("payload_to") = 255);

  m.def(
      "build_frame",
      [](const std::string& name, const py::bytes& body, const py::bytes& mac_header) {
        const std::string b = body, h = mac_header;
        const auto ppdu = build_ppdu(registry().find(name), Bytes(h.begin(), h.end()), Bytes(b.begin(), b.end()));
        return ppdu_bits(ppdu);
      },
      py::arg("config"), py::arg("body"), py::arg("mac_header") = py::bytes(std::string(kMacHeaderBytes, '\0')),
      "PPDU as a list of 0/1 values.");
  m.def(
      "parse_frame",
      [](const std::string& name, const std::vector<std::uint8_t>& bits) {
        const auto ppdu = parse_ppdu(bits, registry().find(name));
        const auto& psdu = ppdu_psdu(ppdu);
        py::dict d;
        d["mac_header"] = py::bytes(reinterpret_cast<const char*>(psdu.mac_header.data()), psdu.mac_header.size());
        d["body"] = py::bytes(reinterpret_cast<const char*>(psdu.body.data()), psdu.body.size());
        d["fcs"] = psdu.fcs;
        return d;
      },
      py::arg("config"), py::arg("bits"));

  m.def(
      "kasami",
      [](int index) {
        const auto c = kasami63(index);
        return std::vector<int>(c.begin(), c.end());
      },
      py::arg("index"));

  m.def(
      "simulate",
      [](const std::string& text, std::optional<std::uint64_t> seed) {
        auto file = parse_scenario(text, registry());
        if (seed) file.scenario.run.seed = *seed;
        RunResult r;
        {
          py::gil_scoped_release release;
          r = run(file.scenario);
        }
        py::dict d;
        py::list nodes;
        for (const auto& n : r.stats.nodes) nodes.append(stats_dict(n));
        d["nodes"] = nodes;
        d["aggregate"] = stats_dict(r.stats.aggregate);
        d["beacons"] = r.stats.beacons;
        d["polls"] = r.stats.polls;
        d["stats_csv"] = stats_csv(r.stats, file.scenario.run.seed);
        d["trace_csv"] = trace_csv(r.trace);
        return d;
      },
      py::arg("scenario_text"), py::arg("seed") = py::none(), "Run a scenario given as file text.");

  m.def(
      "cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, errs;
        const int rc = run_cli(args, out, errs);
        return py::make_tuple(rc, out.str(), errs.str());
      },
      py::arg("args"), "Run the command-line front end; returns (status, stdout, stderr).");
}
