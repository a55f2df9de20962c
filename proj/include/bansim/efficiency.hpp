#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bansim/csma.hpp"
#include "bansim/phy.hpp"
#include "bansim/ppdu.hpp"

namespace bansim {

/// Durations making up one saturated, collision-free frame exchange.
struct ExchangeCycle {
  Duration backoff{0};  // mean: slot x (1 + cw_min) / 2
  Duration frame{0};
  Duration sifs{0};     // both interframe spaces
  Duration ack{0};
  Duration payload{0};  // 8 x payload / PSDU rate

  Duration total() const { return backoff + frame + sifs + ack; }
};

ExchangeCycle exchange_cycle(int payload_bytes, const PhyConfig& cfg, const MacTimingConstants& timing,
                             const PriorityClass& csma, const FrameFormat& fmt = FrameFormat::defaults());

/// T_payload / T_cycle; throws out-of-range unless 1 <= payload <= 255.
double analytic_efficiency(int payload_bytes, const PhyConfig& cfg, const MacTimingConstants& timing = {},
                           const PriorityClass& csma = default_priority(kHighestUserPriority));

struct EfficiencyPoint {
  std::string band;
  double rate_kbps = 0;
  int payload_bytes = 0;
  double efficiency = 0;
};

/// One point per (configuration, payload) in input order.
std::vector<EfficiencyPoint> sweep(std::span<const PhyConfig> configs, int payload_from, int payload_to,
                                   const MacTimingConstants& timing = {},
                                   const PriorityClass& csma = default_priority(kHighestUserPriority));

inline constexpr std::string_view kEfficiencyCsvHeader = "band,rate_kbps,payload_bytes,efficiency";

/// Rates at one decimal, efficiency at four.
std::string efficiency_csv(std::span<const EfficiencyPoint> points);
std::vector<EfficiencyPoint> efficiency_from_csv(std::string_view text);

}  // namespace bansim
