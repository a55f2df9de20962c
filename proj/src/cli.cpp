#include "bansim/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <thread>

#include "bansim/efficiency.hpp"
#include "bansim/error.hpp"
#include "bansim/format.hpp"
#include "bansim/ppdu.hpp"
#include "bansim/scenario.hpp"
#include "bansim/sim.hpp"

namespace bansim {
namespace {

struct GlobalOptions {
  std::string format = "csv";
  std::string out;
  std::string trace;
  std::optional<std::uint64_t> seed;
  int sweep_parallel = 1;
};

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::InvalidConfig, "cannot write " + path);
  f << text;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.insert(0, width - s.size(), ' ');
  return s;
}

/// Right-aligns every column of a CSV text.
std::string csv_as_table(const std::string& csv) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> widths;
  for (auto line : split(csv, '\n')) {
    if (trim(line).empty()) continue;
    std::vector<std::string> cells;
    for (auto c : split(line, ',')) cells.emplace_back(c);
    if (widths.size() < cells.size()) widths.resize(cells.size(), 0);
    for (std::size_t k = 0; k < cells.size(); ++k) widths[k] = std::max(widths[k], cells[k].size());
    rows.push_back(std::move(cells));
  }
  std::string out;
  for (const auto& r : rows) {
    for (std::size_t k = 0; k < r.size(); ++k) {
      if (k > 0) out += "  ";
      out += pad(r[k], widths[k]);
    }
    out += '\n';
  }
  return out;
}

std::string hex_bytes(std::span<const std::uint8_t> bytes) {
  std::string s;
  for (auto b : bytes) s += to_hex(b, 2);
  return s.empty() ? "-" : s;
}

int cmd_rates(const GlobalOptions& g, bool table_only, std::ostream& out) {
  const auto registry = PhyRegistry::from_environment();
  std::vector<PhyConfig> configs;
  if (table_only) {
    for (const auto& ref : rate_table_configs()) {
      const auto* c = registry.try_find(ref.name);
      configs.push_back(c ? *c : ref);
    }
  } else {
    configs = registry.configs();
  }
  emit(g.format == "table" ? rate_table_text(configs) : phy_configs_to_csv(configs), g.out, out);
  return 0;
}

struct EfficiencyOptions {
  std::vector<std::string> configs;
  bool all = false;
  std::optional<int> payload;
  int from = 1;
  int to = static_cast<int>(kMaxBodyBytes);
  int priority = kHighestUserPriority;
  std::optional<std::int64_t> psifs;
  std::optional<std::int64_t> slot;
  std::optional<std::int64_t> guard;
};

int cmd_efficiency(const GlobalOptions& g, const EfficiencyOptions& o, std::ostream& out) {
  const auto registry = PhyRegistry::from_environment();
  std::vector<PhyConfig> configs;
  if (!o.configs.empty()) {
    for (const auto& name : o.configs) configs.push_back(registry.find(name));
  } else if (o.all) {
    configs = registry.configs();
  } else {
    for (const auto& ref : rate_table_configs()) {
      const auto* c = registry.try_find(ref.name);
      configs.push_back(c ? *c : ref);
    }
  }
  MacTimingConstants timing;
  if (o.psifs) timing.psifs = Micros{*o.psifs};
  if (o.slot) timing.slot = Micros{*o.slot};
  if (o.guard) timing.guard = Micros{*o.guard};
  timing.validate();
  const int from = o.payload.value_or(o.from);
  const int to = o.payload.value_or(o.to);
  const auto csv = efficiency_csv(sweep(configs, from, to, timing, default_priority(o.priority)));
  emit(g.format == "table" ? csv_as_table(csv) : csv, g.out, out);
  return 0;
}

int cmd_simulate(const GlobalOptions& g, const std::string& path, std::ostream& out, std::ostream& err) {
  const auto registry = PhyRegistry::from_environment();
  auto file = load_scenario(path, registry);
  auto& sc = file.scenario;
  if (g.seed) sc.run.seed = *g.seed;
  const std::string stats_path = !g.out.empty() ? g.out : file.stats_path ? file.stats_path->string() : "";
  const std::string trace_path = !g.trace.empty() ? g.trace : file.trace_path ? file.trace_path->string() : "";
  if (trace_path.empty()) sc.run.record_trace = false;

  const int runs = std::max(g.sweep_parallel, 1);
  std::vector<std::uint64_t> seeds;
  for (int k = 0; k < runs; ++k) seeds.push_back(sc.run.seed + static_cast<std::uint64_t>(k));
  const int threads = std::min<int>(runs, static_cast<int>(std::max(1U, std::thread::hardware_concurrency())));
  const auto results = run_seeds(sc, seeds, threads);

  const auto csv = stats_csv(results, seeds);
  emit(g.format == "table" ? csv_as_table(csv) : csv, stats_path, out);
  if (!trace_path.empty()) {
    emit(trace_csv(results.front().trace), trace_path, out);
    if (runs > 1) err << "note: trace written for seed " << seeds.front() << " only\n";
  }
  return 0;
}

struct FrameOptionsCli {
  std::string config;
  std::string body_hex;
  std::optional<int> body_size;
  std::string mac_header = "00000000000000";
  bool burst = false;
  int scrambler_seed = 0;
  std::string hex;
  std::string input;
};

int cmd_frame_build(const GlobalOptions& g, const FrameOptionsCli& o, std::ostream& out) {
  const auto registry = PhyRegistry::from_environment();
  const auto& cfg = registry.find(o.config);
  Bytes body;
  if (!o.body_hex.empty()) {
    body = parse_hex(o.body_hex);
  } else {
    const int n = o.body_size.value_or(10);
    if (n < 0) throw Error(Errc::InvalidField, "body size must be >= 0");
    for (int k = 0; k < n; ++k) body.push_back(static_cast<std::uint8_t>(k));
  }
  const auto header = parse_hex(o.mac_header);
  FrameOptions fo;
  fo.burst_mode = o.burst;
  fo.scrambler_seed = static_cast<std::uint8_t>(o.scrambler_seed);
  const auto ppdu = build_ppdu(cfg, header, body, fo);
  emit(hexdump(ppdu, cfg), g.out, out);
  return 0;
}

std::string describe(const Ppdu& ppdu, const PhyConfig& cfg) {
  std::ostringstream s;
  s << "phy: " << cfg.name << '\n';
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, NbPpdu>) {
          s << "family: narrowband\n";
          s << "rate_index: " << int{p.header.rate_index} << '\n';
          s << "body_length: " << int{p.header.body_length} << '\n';
          s << "burst_mode: " << (p.header.burst_mode ? 1 : 0) << '\n';
          s << "scrambler_seed: " << (p.header.scrambler_seed ? 1 : 0) << '\n';
          s << "header_check: 0x" << to_hex(p.header.hcs, 1) << '\n';
        } else if constexpr (std::is_same_v<T, UwbPpdu>) {
          s << "family: uwb\n";
          s << "preamble_repetitions: " << p.preamble_repetitions << '\n';
          s << "rate_index: " << int{p.phr.rate_index} << '\n';
          s << "body_length: " << int{p.phr.body_length} << '\n';
          s << "scrambler_seed: " << int{p.phr.scrambler_seed} << '\n';
          s << "header_check: 0x" << to_hex(p.phr.hcs, 2) << '\n';
        } else {
          s << "family: hbc\n";
          s << "preamble_repetitions: " << p.preamble_repetitions << '\n';
          s << "rate_index: " << int{p.header.rate_index} << '\n';
          s << "body_length: " << int{p.header.body_length} << '\n';
          s << "header_check: 0x" << to_hex(p.header.hcs, 2) << '\n';
        }
      },
      ppdu);
  const auto& psdu = ppdu_psdu(ppdu);
  s << "mac_header: " << hex_bytes(psdu.mac_header) << '\n';
  s << "body: " << hex_bytes(psdu.body) << '\n';
  s << "fcs: 0x" << to_hex(psdu.fcs, 4) << '\n';
  s << "bits: " << ppdu_bits(ppdu).size() << '\n';
  s << "airtime_us: " << fixed(ppdu_airtime(ppdu, cfg).total().count(), 1) << '\n';
  return s.str();
}

int cmd_frame_parse(const GlobalOptions& g, const FrameOptionsCli& o, std::ostream& out) {
  const auto registry = PhyRegistry::from_environment();
  const auto& cfg = registry.find(o.config);
  std::string text = o.hex;
  if (!o.input.empty()) text = o.input == "-" ? std::string(std::istreambuf_iterator<char>(std::cin), {}) : read_text_file(o.input);
  if (text.empty()) throw Error(Errc::InvalidField, "nothing to parse; pass --hex or --in");
  const auto bits = unpack_bytes(parse_hex(text));
  ParseOptions po;
  po.allow_byte_padding = true;
  const auto ppdu = parse_ppdu(bits, cfg, po);
  emit(describe(ppdu, cfg), g.out, out);
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Body area network MAC/PHY simulator and frame toolkit", "bansim"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  std::uint64_t seed = 0;
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "table"}));
  app.add_option("--out", g.out, "Write the main output to this path instead of stdout");
  app.add_option("--trace", g.trace, "Write the event trace (simulate)");
  auto* seed_opt = app.add_option("--seed", seed, "Override the scenario seed (simulate)");
  app.add_option("--sweep-parallel", g.sweep_parallel, "Run N seeds concurrently, starting at the seed (simulate)")
      ->check(CLI::Range(1, 4096));

  auto* rates = app.add_subcommand("rates", "Print the modulation/data-rate table");
  bool rates_table_only = false;
  rates->add_flag("--table-only", rates_table_only, "Only the 21 narrowband table rows");

  auto* eff = app.add_subcommand("efficiency", "Analytic bandwidth efficiency versus payload size");
  EfficiencyOptions eo;
  eff->add_option("--config", eo.configs, "Configuration name (repeatable); default: the 21 table rows");
  eff->add_flag("--all", eo.all, "Every registered configuration");
  eff->add_option("--payload", eo.payload, "Single payload size in bytes");
  eff->add_option("--from", eo.from, "First payload size")->check(CLI::Range(1, 255));
  eff->add_option("--to", eo.to, "Last payload size")->check(CLI::Range(1, 255));
  eff->add_option("--priority", eo.priority, "User priority selecting cw_min")->check(CLI::Range(0, 7));
  eff->add_option("--psifs-us", eo.psifs, "pSIFS override");
  eff->add_option("--slot-us", eo.slot, "CSMA slot override");
  eff->add_option("--guard-us", eo.guard, "Guard time override");

  auto* sim = app.add_subcommand("simulate", "Run a scenario file");
  std::string scenario_path;
  sim->add_option("scenario", scenario_path, "Scenario file")->required();

  auto* frame = app.add_subcommand("frame", "Build or parse PPDUs");
  frame->require_subcommand(1);
  FrameOptionsCli fo;
  auto* build = frame->add_subcommand("build", "Build a PPDU and print an annotated hex dump");
  build->add_option("--config", fo.config, "Configuration name")->required();
  build->add_option("--body", fo.body_hex, "Frame body as hex");
  build->add_option("--body-size", fo.body_size, "Frame body of N counting bytes (default 10)");
  build->add_option("--mac-header", fo.mac_header, "7-byte MAC header as hex");
  build->add_flag("--burst", fo.burst, "Set the burst mode bit (narrowband)");
  build->add_option("--scrambler-seed", fo.scrambler_seed, "Scrambler seed field")->check(CLI::Range(0, 3));
  auto* parse = frame->add_subcommand("parse", "Parse a hex PPDU image and list its fields");
  parse->add_option("--config", fo.config, "Configuration name")->required();
  parse->add_option("--hex", fo.hex, "PPDU image as hex or hex dump text");
  parse->add_option("--in", fo.input, "Read the image from a file ('-' for stdin)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }
  if (*seed_opt) g.seed = seed;

  try {
    if (*rates) return cmd_rates(g, rates_table_only, out);
    if (*eff) return cmd_efficiency(g, eo, out);
    if (*sim) return cmd_simulate(g, scenario_path, out, err);
    if (*build) return cmd_frame_build(g, fo, out);
    if (*parse) return cmd_frame_parse(g, fo, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace bansim
