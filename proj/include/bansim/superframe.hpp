#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace bansim {

using Micros = std::chrono::microseconds;

/// Access phases in superframe order. Zero-length phases are dropped from a
/// layout but never reorder the others.
enum class PhaseKind { Beacon, EAP1, RAP1, TypeI_II_a, EAP2, RAP2, TypeI_II_b, CAP };

std::string_view to_string(PhaseKind kind);

enum class OperationalMode { BeaconWithBoundaries, NonBeaconWithBoundaries, NonBeaconWithoutBoundaries };

/// Type I grants are time based, Type II grants count frames. Both are
/// simulated as time grants; the label is carried for reporting.
enum class AccessPhaseType { TypeI, TypeII };

enum class AccessMethod { Contention, Polled, Scheduled };

inline constexpr int kHighestUserPriority = 7;

struct LayoutConfig {
  OperationalMode mode = OperationalMode::BeaconWithBoundaries;
  Micros slot_length{500};
  int slots_per_superframe = 256;
  int beacon_slots = 1;
  int eap1 = 0;
  int rap1 = 0;
  int type_a = 0;
  int eap2 = 0;
  int rap2 = 0;
  int type_b = 0;
  int cap = 0;
  AccessPhaseType type_a_label = AccessPhaseType::TypeI;
  AccessPhaseType type_b_label = AccessPhaseType::TypeI;
  /// Phase type covering the superframe in non-beacon mode with boundaries.
  AccessPhaseType nonbeacon_type = AccessPhaseType::TypeII;
  /// Every `beacon_period`-th superframe is active; the rest are inactive.
  int beacon_period = 1;
  /// Beacons prohibited by regulation (MICS); the beacon slot stays silent.
  bool beacon_prohibited = false;
};

struct Phase {
  PhaseKind kind;
  int start_slot;
  int length_slots;
  AccessPhaseType label = AccessPhaseType::TypeI;
};

struct PhaseAt {
  PhaseKind kind;
  Micros remaining;
  Micros start;
  Micros end;
  std::size_t index;  // into `PhaseLayout::phases()`
};

class PhaseLayout {
 public:
  PhaseLayout(OperationalMode mode, Micros slot_length, int slots, std::vector<Phase> phases,
              int beacon_period, bool beacon_prohibited);

  OperationalMode mode() const { return mode_; }
  Micros slot_length() const { return slot_length_; }
  int slots_per_superframe() const { return slots_; }
  Micros superframe_duration() const { return slot_length_ * slots_; }
  const std::vector<Phase>& phases() const { return phases_; }
  int beacon_period() const { return beacon_period_; }
  bool beacon_prohibited() const { return beacon_prohibited_; }

  const Phase* find(PhaseKind kind) const;
  Micros phase_start(const Phase& p) const { return slot_length_ * p.start_slot; }
  Micros phase_end(const Phase& p) const { return slot_length_ * (p.start_slot + p.length_slots); }

  bool superframe_active(std::int64_t index) const;
  /// Beacon sent at the start of this superframe.
  bool beacon_transmitted(std::int64_t index) const;

 private:
  OperationalMode mode_;
  Micros slot_length_;
  int slots_;
  std::vector<Phase> phases_;
  int beacon_period_;
  bool beacon_prohibited_;
};

/// Throws invalid-layout when lengths are negative or do not sum to the
/// superframe length.
PhaseLayout build_layout(const LayoutConfig& config);

/// Phase containing `t` (0 <= t < superframe duration); throws out-of-range.
PhaseAt phase_at(const PhaseLayout& layout, Micros t);

/// EAPs carry only highest-priority contention; RAP and CAP carry any
/// contention; Type I/II phases carry only polled and scheduled access.
bool admissible(PhaseKind kind, int user_priority, AccessMethod method);

/// `admissible` narrowed by the operational mode: without superframe
/// boundaries only unscheduled polling remains.
bool admissible(const PhaseLayout& layout, PhaseKind kind, int user_priority, AccessMethod method);

struct PollGrant {
  int node_id;
  Micros start;   // offset within the superframe
  Micros length;  // includes the guard time
  AccessPhaseType label;
};

/// Round-robin grants of `grant_length` filling the first `phase` of the
/// layout. An absent phase, no nodes, or a phase shorter than one grant
/// gives an empty list. Throws invalid-layout if `phase` is not Type I/II.
std::vector<PollGrant> schedule_polls(const PhaseLayout& layout, std::span<const int> nodes, PhaseKind phase,
                                      Micros grant_length);

/// Grant long enough for one maximum frame exchange plus guard time.
Micros poll_grant_length(Micros max_frame_airtime, Micros ack_airtime, Micros sifs, Micros guard);

enum class LinkDirection { Uplink, Downlink, Bilink, DelayedBilink };

std::string_view to_string(LinkDirection d);
LinkDirection parse_direction(std::string_view name);

/// Delayed bilink is accepted and scheduled like bilink.
struct ScheduledAllocation {
  int node_id = 0;
  int start_slot = 0;
  int length_slots = 1;
  int period = 1;  // 1-periodic when 1, m-periodic otherwise
  int offset = 0;  // recurs in superframes where index mod period == offset
  LinkDirection direction = LinkDirection::Uplink;

  bool recurs_in(std::int64_t superframe_index) const {
    return superframe_index % period == offset;
  }
};

/// Slot owner for one superframe, one entry per allocation slot.
using SlotMap = std::vector<std::optional<int>>;

/// Places the allocations recurring in `superframe_index`. Throws
/// allocation-conflict on overlap and invalid-layout for an allocation
/// outside a Type I/II phase.
SlotMap place_scheduled(std::span<const ScheduledAllocation> allocations, const PhaseLayout& layout,
                        std::int64_t superframe_index);

/// Checks every superframe of one hyperperiod (lcm of the periods).
void validate_allocations(std::span<const ScheduledAllocation> allocations, const PhaseLayout& layout);

}  // namespace bansim
