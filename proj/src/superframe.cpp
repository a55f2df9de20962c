#include "bansim/superframe.hpp"

#include <numeric>
#include <string>

#include "bansim/error.hpp"

namespace bansim {

std::string_view to_string(PhaseKind kind) {
  switch (kind) {
    case PhaseKind::Beacon: return "beacon";
    case PhaseKind::EAP1: return "eap1";
    case PhaseKind::RAP1: return "rap1";
    case PhaseKind::TypeI_II_a: return "type_a";
    case PhaseKind::EAP2: return "eap2";
    case PhaseKind::RAP2: return "rap2";
    case PhaseKind::TypeI_II_b: return "type_b";
    case PhaseKind::CAP: return "cap";
  }
  return "?";
}

PhaseLayout::PhaseLayout(OperationalMode mode, Micros slot_length, int slots, std::vector<Phase> phases,
                         int beacon_period, bool beacon_prohibited)
    : mode_(mode),
      slot_length_(slot_length),
      slots_(slots),
      phases_(std::move(phases)),
      beacon_period_(beacon_period),
      beacon_prohibited_(beacon_prohibited) {}

const Phase* PhaseLayout::find(PhaseKind kind) const {
  for (const auto& p : phases_) {
    if (p.kind == kind) return &p;
  }
  return nullptr;
}

bool PhaseLayout::superframe_active(std::int64_t index) const { return index % beacon_period_ == 0; }

bool PhaseLayout::beacon_transmitted(std::int64_t index) const {
  return mode_ == OperationalMode::BeaconWithBoundaries && !beacon_prohibited_ && superframe_active(index);
}

PhaseLayout build_layout(const LayoutConfig& c) {
  auto fail = [](const std::string& why) { throw Error(Errc::InvalidLayout, why); };
  if (c.slot_length <= Micros{0}) fail("slot length must be positive");
  if (c.slots_per_superframe <= 0) fail("superframe needs at least one slot");
  if (c.beacon_period < 1) fail("beacon period multiplier must be >= 1");

  const int lengths[] = {c.eap1, c.rap1, c.type_a, c.eap2, c.rap2, c.type_b, c.cap};
  for (int len : lengths) {
    if (len < 0) fail("phase lengths must be non-negative");
  }
  const int access_total = std::accumulate(std::begin(lengths), std::end(lengths), 0);

  std::vector<Phase> phases;
  if (c.mode == OperationalMode::BeaconWithBoundaries) {
    if (c.beacon_slots < 1) fail("beacon mode needs a beacon slot");
    const int total = c.beacon_slots + access_total;
    if (total != c.slots_per_superframe) {
      fail("phase lengths sum to " + std::to_string(total) + " slots, superframe has " +
           std::to_string(c.slots_per_superframe));
    }
    const PhaseKind kinds[] = {PhaseKind::EAP1, PhaseKind::RAP1, PhaseKind::TypeI_II_a, PhaseKind::EAP2,
                               PhaseKind::RAP2, PhaseKind::TypeI_II_b, PhaseKind::CAP};
    phases.push_back({PhaseKind::Beacon, 0, c.beacon_slots});
    int start = c.beacon_slots;
    for (int i = 0; i < 7; ++i) {
      if (lengths[i] == 0) continue;
      Phase p{kinds[i], start, lengths[i]};
      if (kinds[i] == PhaseKind::TypeI_II_a) p.label = c.type_a_label;
      if (kinds[i] == PhaseKind::TypeI_II_b) p.label = c.type_b_label;
      phases.push_back(p);
      start += lengths[i];
    }
  } else {
    if (access_total != 0) fail("non-beacon modes cover the superframe with a single Type I/II phase");
    const auto label = c.mode == OperationalMode::NonBeaconWithoutBoundaries ? AccessPhaseType::TypeII : c.nonbeacon_type;
    phases.push_back({PhaseKind::TypeI_II_a, 0, c.slots_per_superframe, label});
  }
  return PhaseLayout(c.mode, c.slot_length, c.slots_per_superframe, std::move(phases), c.beacon_period,
                     c.beacon_prohibited);
}

PhaseAt phase_at(const PhaseLayout& layout, Micros t) {
  if (t < Micros{0} || t >= layout.superframe_duration()) {
    throw Error(Errc::OutOfRange, "time " + std::to_string(t.count()) + " us is outside the superframe");
  }
  const auto& phases = layout.phases();
  for (std::size_t i = 0; i < phases.size(); ++i) {
    const auto end = layout.phase_end(phases[i]);
    if (t < end) return PhaseAt{phases[i].kind, end - t, layout.phase_start(phases[i]), end, i};
  }
  throw Error(Errc::InvalidLayout, "layout does not cover the superframe");
}

bool admissible(PhaseKind kind, int user_priority, AccessMethod method) {
  switch (kind) {
    case PhaseKind::Beacon:
      return false;
    case PhaseKind::EAP1:
    case PhaseKind::EAP2:
      return method == AccessMethod::Contention && user_priority == kHighestUserPriority;
    case PhaseKind::RAP1:
    case PhaseKind::RAP2:
    case PhaseKind::CAP:
      return method == AccessMethod::Contention;
    case PhaseKind::TypeI_II_a:
    case PhaseKind::TypeI_II_b:
      return method == AccessMethod::Polled || method == AccessMethod::Scheduled;
  }
  return false;
}

bool admissible(const PhaseLayout& layout, PhaseKind kind, int user_priority, AccessMethod method) {
  if (layout.mode() == OperationalMode::NonBeaconWithoutBoundaries && method != AccessMethod::Polled) return false;
  return admissible(kind, user_priority, method);
}

std::vector<PollGrant> schedule_polls(const PhaseLayout& layout, std::span<const int> nodes, PhaseKind phase,
                                      Micros grant_length) {
  if (phase != PhaseKind::TypeI_II_a && phase != PhaseKind::TypeI_II_b) {
    throw Error(Errc::InvalidLayout, "polls are granted only in Type I/II phases");
  }
  if (grant_length <= Micros{0}) throw Error(Errc::InvalidLayout, "grant length must be positive");
  std::vector<PollGrant> grants;
  const Phase* p = layout.find(phase);
  if (p == nullptr || nodes.empty()) return grants;
  const auto start = layout.phase_start(*p);
  const auto count = (layout.phase_end(*p) - start) / grant_length;
  for (std::int64_t i = 0; i < count; ++i) {
    grants.push_back(PollGrant{nodes[static_cast<std::size_t>(i) % nodes.size()], start + grant_length * i,
                               grant_length, p->label});
  }
  return grants;
}

Micros poll_grant_length(Micros max_frame_airtime, Micros ack_airtime, Micros sifs, Micros guard) {
  return max_frame_airtime + sifs + ack_airtime + guard;
}

std::string_view to_string(LinkDirection d) {
  switch (d) {
    case LinkDirection::Uplink: return "uplink";
    case LinkDirection::Downlink: return "downlink";
    case LinkDirection::Bilink: return "bilink";
    case LinkDirection::DelayedBilink: return "delayed-bilink";
  }
  return "?";
}

LinkDirection parse_direction(std::string_view name) {
  for (auto d : {LinkDirection::Uplink, LinkDirection::Downlink, LinkDirection::Bilink, LinkDirection::DelayedBilink}) {
    if (to_string(d) == name) return d;
  }
  throw Error(Errc::InvalidConfig, "unknown allocation direction '" + std::string(name) + "'");
}

namespace {

void check_allocation(const ScheduledAllocation& a, const PhaseLayout& layout) {
  auto where = [&] { return "allocation of node " + std::to_string(a.node_id); };
  if (layout.mode() == OperationalMode::NonBeaconWithoutBoundaries) {
    throw Error(Errc::InvalidLayout, where() + ": no scheduled access without superframe boundaries");
  }
  if (a.period < 1 || a.offset < 0 || a.offset >= a.period) {
    throw Error(Errc::InvalidLayout, where() + ": need period >= 1 and 0 <= offset < period");
  }
  if (a.length_slots < 1) throw Error(Errc::InvalidLayout, where() + ": empty allocation");
  for (const auto& p : layout.phases()) {
    const bool typed = p.kind == PhaseKind::TypeI_II_a || p.kind == PhaseKind::TypeI_II_b;
    if (typed && a.start_slot >= p.start_slot && a.start_slot + a.length_slots <= p.start_slot + p.length_slots) {
      return;
    }
  }
  throw Error(Errc::InvalidLayout, where() + ": slots must lie inside one Type I/II phase");
}

}  // namespace

SlotMap place_scheduled(std::span<const ScheduledAllocation> allocations, const PhaseLayout& layout,
                        std::int64_t superframe_index) {
  SlotMap map(static_cast<std::size_t>(layout.slots_per_superframe()));
  for (const auto& a : allocations) {
    check_allocation(a, layout);
    if (!a.recurs_in(superframe_index)) continue;
    for (int s = a.start_slot; s < a.start_slot + a.length_slots; ++s) {
      auto& owner = map[static_cast<std::size_t>(s)];
      if (owner) {
        throw Error(Errc::AllocationConflict, "slot " + std::to_string(s) + " of superframe " +
                                                  std::to_string(superframe_index) + " claimed by nodes " +
                                                  std::to_string(*owner) + " and " + std::to_string(a.node_id));
      }
      owner = a.node_id;
    }
  }
  return map;
}

void validate_allocations(std::span<const ScheduledAllocation> allocations, const PhaseLayout& layout) {
  std::int64_t hyper = 1;
  for (const auto& a : allocations) {
    check_allocation(a, layout);
    hyper = std::lcm(hyper, static_cast<std::int64_t>(a.period));
  }
  for (std::int64_t i = 0; i < hyper; ++i) (void)place_scheduled(allocations, layout, i);
}

}  // namespace bansim
