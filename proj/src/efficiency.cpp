#include "bansim/efficiency.hpp"

#include "bansim/error.hpp"
#include "bansim/format.hpp"

namespace bansim {

ExchangeCycle exchange_cycle(int payload_bytes, const PhyConfig& cfg, const MacTimingConstants& timing,
                             const PriorityClass& csma, const FrameFormat& fmt) {
  if (payload_bytes < 1 || payload_bytes > static_cast<int>(kMaxBodyBytes)) {
    throw Error(Errc::OutOfRange, "payload must be 1..255 bytes, got " + std::to_string(payload_bytes));
  }
  ExchangeCycle c;
  c.backoff = Duration(static_cast<double>(timing.slot.count()) * (1.0 + csma.cw_min) / 2.0);
  c.frame = frame_airtime(cfg, static_cast<std::size_t>(payload_bytes), fmt).total();
  c.sifs = Duration(2.0 * static_cast<double>(timing.psifs.count()));
  c.ack = frame_airtime(cfg, 0, fmt).total();
  c.payload = Duration(1000.0 * 8.0 * payload_bytes / info_data_rate(cfg, Component::Psdu));
  return c;
}

double analytic_efficiency(int payload_bytes, const PhyConfig& cfg, const MacTimingConstants& timing,
                           const PriorityClass& csma) {
  const auto c = exchange_cycle(payload_bytes, cfg, timing, csma);
  return c.payload / c.total();
}

std::vector<EfficiencyPoint> sweep(std::span<const PhyConfig> configs, int payload_from, int payload_to,
                                   const MacTimingConstants& timing, const PriorityClass& csma) {
  if (payload_from > payload_to) throw Error(Errc::OutOfRange, "empty payload range");
  std::vector<EfficiencyPoint> points;
  for (const auto& cfg : configs) {
    const double rate = info_data_rate(cfg, Component::Psdu);
    for (int p = payload_from; p <= payload_to; ++p) {
      points.push_back({std::string(band_info(cfg.band).key), rate, p, analytic_efficiency(p, cfg, timing, csma)});
    }
  }
  return points;
}

std::string efficiency_csv(std::span<const EfficiencyPoint> points) {
  std::string out(kEfficiencyCsvHeader);
  out += '\n';
  for (const auto& p : points) {
    out += p.band + ',' + fixed(p.rate_kbps, 1) + ',' + std::to_string(p.payload_bytes) + ',' +
           fixed(p.efficiency, 4) + '\n';
  }
  return out;
}

std::vector<EfficiencyPoint> efficiency_from_csv(std::string_view text) {
  std::vector<EfficiencyPoint> points;
  int line_no = 0;
  for (auto line : split(text, '\n')) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != kEfficiencyCsvHeader) throw Error(Errc::InvalidConfig, "line 1: unexpected efficiency CSV header");
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 4) throw Error(Errc::InvalidConfig, "line " + std::to_string(line_no) + ": expected 4 fields");
    points.push_back({std::string(f[0]), parse_double(f[1]), static_cast<int>(parse_int(f[2])), parse_double(f[3])});
  }
  return points;
}

}  // namespace bansim
