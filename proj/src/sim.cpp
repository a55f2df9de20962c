#include "bansim/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <queue>
#include <set>
#include <thread>
#include <tuple>

#include "bansim/error.hpp"
#include "bansim/format.hpp"

namespace bansim {
namespace {

constexpr int kHubId = 0;
constexpr int kExternalId = -1;
constexpr int kExternalSource = -2;
constexpr std::int64_t kForever = std::numeric_limits<std::int64_t>::max();
constexpr std::uint64_t kNoWindow = std::numeric_limits<std::uint64_t>::max();

// Declaration order is the tiebreak rank at equal time.
enum class Ev { PhaseStart, TxEnd, AckDue, BeaconTx, TrafficArrival, PollGrant, SlotTick, TxStart };

struct Event {
  std::int64_t t;
  Ev kind;
  std::uint64_t seq;
  int node;
  std::uint64_t token;
  std::int64_t aux;
};

struct Later {
  bool operator()(const Event& a, const Event& b) const {
    return std::tie(a.t, a.kind, a.seq) > std::tie(b.t, b.kind, b.seq);
  }
};

enum class TxKind { Data, Ack, Poll, Beacon, External };

struct Tx {
  std::uint64_t id;
  TxKind kind;
  int node;  // sender of data, addressee of ack/poll
  std::int64_t start;
  std::int64_t end;
  std::int64_t limit;
  bool collided = false;
  bool corrupted = false;
};

struct Window {
  PhaseKind kind = PhaseKind::Beacon;
  std::int64_t start = 0;
  std::int64_t end = 0;
  std::int64_t superframe = 0;
  bool idle = true;
  int phase_index = -1;  // layout phase, or position in the scripted list
  std::uint64_t serial = 0;
};

enum class Mode { Empty, Wait, Sifs, Countdown, TxPending, Transmitting, AwaitAck };

enum : std::uint64_t { kPollGrant = 0, kAllocationGrant = 1 };
enum : std::int64_t { kSlotTick = 0, kSifsDone = 1, kAckStart = 0, kAckTimeout = 1 };

Rng node_rng(std::uint64_t seed, int id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(id)};
  return Rng(seq);
}

std::size_t ppdu_bit_length(const PhyConfig& cfg, std::size_t body) {
  std::size_t bits = 0;
  for (const auto& f : field_layout(cfg, body)) bits += f.bit_length;
  return bits;
}

[[noreturn]] void scenario_error(const std::string& what) { throw Error(Errc::InvalidScenario, what); }

class Kernel {
 public:
  explicit Kernel(const Scenario& sc);
  RunResult run();

 private:
  struct NodeRt {
    NodeSpec spec;
    BackoffState bo;
    Rng rng;
    std::deque<std::int64_t> queue;
    Mode mode = Mode::Empty;
    std::uint64_t epoch = 0;
    std::int64_t hol_since = 0;
    int frame_attempts = 0;
    int total_attempts = 0;
    std::size_t script_pos = 0;
    std::set<int> lost;
    std::uint64_t sifs_window = kNoWindow;
    std::uint64_t guard_window = kNoWindow;
    std::int64_t grant_end = 0;
    std::int64_t limit = 0;
    std::int64_t frame_air = 0;
    Bytes payload;
    std::optional<SecuredFrame> in_flight;
    NodeStats stats;
    double delay_sum = 0;
  };

  void push(std::int64_t t, Ev kind, int node = -1, std::uint64_t token = 0, std::int64_t aux = 0);
  Window first_window() const;
  Window next_window(const Window& w) const;
  std::string_view phase_name() const;
  void trace(std::int64_t t, int node_id, std::string_view event, const BackoffState* bo = nullptr);
  void trace(std::int64_t t, std::size_t i, std::string_view event) { trace(t, nodes_[i].spec.id, event, &nodes_[i].bo); }

  bool contention_admissible(const NodeRt& n) const;
  std::int64_t exchange_time(const NodeRt& n) const;

  void on_phase_start(std::int64_t t);
  void schedule_grants(std::int64_t t);
  void on_arrival(std::size_t i, std::int64_t t);
  void enqueue(std::size_t i, std::int64_t t);
  void next_frame(std::size_t i, std::int64_t t);
  void draw(std::size_t i, std::int64_t t);
  void try_start(std::size_t i, std::int64_t t);
  void try_grant_tx(std::size_t i, std::int64_t t);
  void on_sifs_done(std::size_t i, std::int64_t t);
  void on_tick(std::size_t i, std::int64_t t);
  void on_data_start(std::size_t i, std::int64_t t, std::int64_t limit);
  void start_tx(std::int64_t t, TxKind kind, int node, std::int64_t duration, std::int64_t limit);
  void on_tx_end(std::int64_t t, std::uint64_t id);
  void on_poll_grant(std::size_t i, std::int64_t t, std::uint64_t type, std::int64_t end);
  void success(std::size_t i, std::int64_t t);
  void failure(std::size_t i, std::int64_t t);
  void retire_frame(std::size_t i, std::int64_t t);
  void wake_waiting(std::int64_t t);

  const Scenario& sc_;
  std::optional<PhaseLayout> layout_;
  std::vector<Window> scripted_;
  Window win_;
  Window next_win_;
  std::uint64_t win_serial_ = 0;
  std::vector<NodeRt> nodes_;
  std::map<int, std::size_t> index_of_;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::uint64_t seq_ = 0;
  std::uint64_t tx_seq_ = 0;
  std::vector<Tx> active_;
  Rng channel_rng_;
  KeyManager keys_;
  std::vector<SecuritySession> sessions_;
  std::int64_t ack_air_ = 0;
  std::int64_t beacon_air_ = 0;
  std::size_t ack_bits_ = 0;
  std::int64_t end_ = 0;
  std::int64_t busy_sum_ = 0;
  std::int64_t busy_union_ = 0;
  std::int64_t busy_since_ = 0;
  RunResult out_;
};

Kernel::Kernel(const Scenario& sc) : sc_(sc), channel_rng_(node_rng(sc.run.seed, kExternalId)), keys_(kHubId) {
  validate(sc);
  end_ = sc.run.duration.count();
  if (sc.scripted_phases.empty()) {
    auto cfg = sc.superframe;
    cfg.beacon_prohibited = cfg.beacon_prohibited || band_info(sc.phy.band).beacon_prohibited;
    layout_.emplace(build_layout(cfg));
  } else {
    auto phases = sc.scripted_phases;
    std::sort(phases.begin(), phases.end(), [](const auto& a, const auto& b) { return a.start < b.start; });
    std::int64_t cursor = 0;
    auto add = [this](PhaseKind kind, std::int64_t s, std::int64_t e, bool idle) {
      Window w;
      w.kind = kind;
      w.start = s;
      w.end = e;
      w.idle = idle;
      w.phase_index = static_cast<int>(scripted_.size());
      scripted_.push_back(w);
    };
    for (const auto& p : phases) {
      if (p.start.count() > cursor) add(PhaseKind::Beacon, cursor, p.start.count(), true);
      add(p.kind, p.start.count(), p.end.count(), false);
      cursor = p.end.count();
    }
    add(PhaseKind::Beacon, cursor, kForever, true);
  }

  ack_air_ = frame_duration(sc.phy, 0).count();
  ack_bits_ = ppdu_bit_length(sc.phy, 0);
  beacon_air_ = frame_duration(sc.phy, static_cast<std::size_t>(sc.run.beacon_body_bytes)).count();

  for (const auto& spec : sc.nodes) {
    NodeRt n;
    n.spec = spec;
    n.bo = BackoffState::initial(spec.priority);
    n.rng = node_rng(sc.run.seed, spec.id);
    n.lost.insert(spec.lost_attempts.begin(), spec.lost_attempts.end());
    n.payload.resize(static_cast<std::size_t>(spec.payload_bytes));
    for (std::size_t k = 0; k < n.payload.size(); ++k) n.payload[k] = static_cast<std::uint8_t>(spec.id * 31 + k);
    const auto wire = n.payload.size() + security_overhead(spec.security);
    n.frame_air = frame_duration(sc.phy, wire).count();
    n.stats.node = spec.id;
    index_of_[spec.id] = nodes_.size();
    nodes_.push_back(std::move(n));
    sessions_.push_back(keys_.associate(spec.id, spec.security, spec.mk));
  }

  std::map<int, std::vector<SecuritySession*>> groups;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].spec.group) groups[*nodes_[i].spec.group].push_back(&sessions_[i]);
  }
  for (auto& [id, members] : groups) keys_.distribute_gtk(id, members);
}

void Kernel::push(std::int64_t t, Ev kind, int node, std::uint64_t token, std::int64_t aux) {
  queue_.push(Event{t, kind, seq_++, node, token, aux});
}

Window Kernel::first_window() const {
  if (!layout_) return scripted_.front();
  Window w;
  w.superframe = 0;
  w.start = 0;
  if (!layout_->superframe_active(0)) {
    w.end = layout_->superframe_duration().count();
    return w;
  }
  const auto& p = layout_->phases().front();
  w.kind = p.kind;
  w.idle = false;
  w.phase_index = 0;
  w.end = layout_->phase_end(p).count();
  return w;
}

Window Kernel::next_window(const Window& cur) const {
  if (!layout_) {
    const auto next = static_cast<std::size_t>(cur.phase_index) + 1;
    return next < scripted_.size() ? scripted_[next] : cur;
  }
  const auto duration = layout_->superframe_duration().count();
  const auto& phases = layout_->phases();
  Window w;
  if (!cur.idle && static_cast<std::size_t>(cur.phase_index) + 1 < phases.size()) {
    w.superframe = cur.superframe;
    w.phase_index = cur.phase_index + 1;
  } else {
    w.superframe = cur.superframe + 1;
    w.phase_index = 0;
  }
  const auto base = w.superframe * duration;
  if (!layout_->superframe_active(w.superframe)) {
    w.phase_index = -1;
    w.start = base;
    w.end = base + duration;
    return w;
  }
  const auto& p = phases[static_cast<std::size_t>(w.phase_index)];
  w.kind = p.kind;
  w.idle = false;
  w.start = base + layout_->phase_start(p).count();
  w.end = base + layout_->phase_end(p).count();
  return w;
}

std::string_view Kernel::phase_name() const { return win_.idle ? "idle" : to_string(win_.kind); }

void Kernel::trace(std::int64_t t, int node_id, std::string_view event, const BackoffState* bo) {
  if (!sc_.run.record_trace) return;
  TraceEvent e;
  e.time_us = t;
  e.node = node_id;
  e.event = std::string(event);
  if (bo != nullptr) {
    e.counter = bo->counter;
    e.cw = bo->cw;
    e.failures = bo->consecutive_failures;
  }
  e.phase = std::string(phase_name());
  out_.trace.push_back(std::move(e));
}

bool Kernel::contention_admissible(const NodeRt& n) const {
  if (win_.idle) return false;
  const int up = n.spec.priority.user_priority;
  return layout_ ? admissible(*layout_, win_.kind, up, AccessMethod::Contention)
                 : admissible(win_.kind, up, AccessMethod::Contention);
}

std::int64_t Kernel::exchange_time(const NodeRt& n) const {
  return n.frame_air + sc_.timing.psifs.count() + ack_air_ + sc_.timing.guard.count();
}

RunResult Kernel::run() {
  next_win_ = first_window();
  push(0, Ev::PhaseStart);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& tr = nodes_[i].spec.traffic;
    const int node = static_cast<int>(i);
    switch (tr.kind) {
      case TrafficKind::Saturated:
        push(0, Ev::TrafficArrival, node);
        break;
      case TrafficKind::Poisson:
        on_arrival(i, -1);  // schedules the first arrival only
        break;
      case TrafficKind::Scripted:
        for (auto a : tr.arrivals) push(a.count(), Ev::TrafficArrival, node);
        break;
    }
  }
  for (const auto& b : sc_.busy) push(b.start.count(), Ev::TxStart, kExternalSource, 0, b.end.count());

  while (!queue_.empty() && queue_.top().t < end_) {
    const Event e = queue_.top();
    queue_.pop();
    const auto i = static_cast<std::size_t>(std::max(e.node, 0));
    switch (e.kind) {
      case Ev::PhaseStart:
        on_phase_start(e.t);
        break;
      case Ev::TxEnd:
        on_tx_end(e.t, e.token);
        break;
      case Ev::AckDue:
        if (e.aux == kAckStart) {
          trace(e.t, kHubId, "ack_tx");
          start_tx(e.t, TxKind::Ack, e.node, ack_air_, nodes_[i].limit);
        } else {
          failure(i, e.t);
        }
        break;
      case Ev::BeaconTx:
        ++out_.stats.beacons;
        trace(e.t, kHubId, "beacon");
        start_tx(e.t, TxKind::Beacon, -1, beacon_air_, kForever);
        break;
      case Ev::TrafficArrival:
        on_arrival(i, e.t);
        break;
      case Ev::PollGrant:
        on_poll_grant(i, e.t, e.token, e.aux);
        break;
      case Ev::SlotTick:
        if (e.token != nodes_[i].epoch) break;
        if (e.aux == kSifsDone) {
          on_sifs_done(i, e.t);
        } else {
          on_tick(i, e.t);
        }
        break;
      case Ev::TxStart:
        if (e.node == kExternalSource) {
          trace(e.t, kExternalId, "busy_start");
          start_tx(e.t, TxKind::External, -1, e.aux - e.t, kForever);
        } else {
          on_data_start(i, e.t, e.aux);
        }
        break;
    }
  }

  auto& st = out_.stats;
  st.elapsed = sc_.run.duration;
  if (!active_.empty()) busy_union_ += end_ - busy_since_;
  const auto idle = end_ - busy_union_;
  auto& agg = st.aggregate;
  agg.node = -1;
  double delay_sum = 0;
  for (auto& n : nodes_) {
    auto& s = n.stats;
    s.queued = static_cast<std::int64_t>(n.queue.size());
    s.efficiency = end_ > 0 ? s.payload_time_us / static_cast<double>(end_) : 0.0;
    s.mean_access_delay_us = s.delivered > 0 ? n.delay_sum / static_cast<double>(s.delivered) : 0.0;
    s.idle_us = idle;
    agg.offered += s.offered;
    agg.delivered += s.delivered;
    agg.failed += s.failed;
    agg.overflow += s.overflow;
    agg.collided += s.collided;
    agg.attempts += s.attempts;
    agg.queued += s.queued;
    agg.payload_bits += s.payload_bits;
    agg.payload_time_us += s.payload_time_us;
    delay_sum += n.delay_sum;
    st.nodes.push_back(s);
  }
  agg.efficiency = end_ > 0 ? agg.payload_time_us / static_cast<double>(end_) : 0.0;
  agg.mean_access_delay_us = agg.delivered > 0 ? delay_sum / static_cast<double>(agg.delivered) : 0.0;
  agg.busy_us = busy_sum_;
  agg.idle_us = idle;
  return std::move(out_);
}

void Kernel::on_phase_start(std::int64_t t) {
  win_ = next_win_;
  win_.serial = ++win_serial_;
  trace(t, kHubId, "phase_start");
  next_win_ = next_window(win_);
  if (next_win_.start > win_.start && next_win_.start < end_) push(next_win_.start, Ev::PhaseStart);

  if (layout_ && !win_.idle) {
    if (win_.kind == PhaseKind::Beacon && layout_->beacon_transmitted(win_.superframe)) push(t, Ev::BeaconTx);
    if (win_.kind == PhaseKind::TypeI_II_a || win_.kind == PhaseKind::TypeI_II_b) schedule_grants(t);
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    auto& n = nodes_[i];
    if (n.mode == Mode::Sifs && n.sifs_window != win_.serial) {
      ++n.epoch;
      n.mode = Mode::Wait;
    }
    if (n.mode == Mode::Countdown) throw Error(Errc::SimulationFault, "backoff countdown crossed a phase boundary");
  }
  wake_waiting(t);
}

void Kernel::schedule_grants(std::int64_t t) {
  const auto& phase = layout_->phases()[static_cast<std::size_t>(win_.phase_index)];
  const auto base = win_.superframe * layout_->superframe_duration().count();
  const auto slot = layout_->slot_length().count();

  bool allocated = false;
  if (!sc_.allocations.empty()) {
    const auto map = place_scheduled(sc_.allocations, *layout_, win_.superframe);
    int s = phase.start_slot;
    const int stop = phase.start_slot + phase.length_slots;
    while (s < stop) {
      const auto owner = map[static_cast<std::size_t>(s)];
      int e = s + 1;
      while (e < stop && map[static_cast<std::size_t>(e)] == owner) ++e;
      if (owner) {
        allocated = true;
        push(base + s * slot, Ev::PollGrant, static_cast<int>(index_of_.at(*owner)), kAllocationGrant, base + e * slot);
      }
      s = e;
    }
  }
  if (allocated) return;

  std::vector<int> polled;
  std::int64_t max_frame = 0;
  for (const auto& n : nodes_) {
    if (n.spec.access != AccessMethod::Polled) continue;
    polled.push_back(n.spec.id);
    max_frame = std::max(max_frame, n.frame_air);
  }
  if (polled.empty()) return;
  const auto psifs = sc_.timing.psifs;
  const auto grant = poll_grant_length(Micros{ack_air_} + psifs + Micros{max_frame}, Micros{ack_air_}, psifs,
                                       sc_.timing.guard);
  for (const auto& g : schedule_polls(*layout_, polled, win_.kind, grant)) {
    const auto start = base + g.start.count();
    if (start < t) continue;
    push(start, Ev::PollGrant, static_cast<int>(index_of_.at(g.node_id)), kPollGrant, start + g.length.count());
  }
}

void Kernel::on_arrival(std::size_t i, std::int64_t t) {
  auto& n = nodes_[i];
  const auto& tr = n.spec.traffic;
  if (tr.kind == TrafficKind::Poisson) {
    const double u = uniform_unit(n.rng);
    const auto gap = std::llround(-std::log1p(-u) / tr.rate_per_s * 1e6);
    const auto base = std::max<std::int64_t>(t, 0);
    push(base + std::max<std::int64_t>(gap, 1), Ev::TrafficArrival, static_cast<int>(i));
    if (t < 0) return;
  }
  enqueue(i, t);
}

void Kernel::enqueue(std::size_t i, std::int64_t t) {
  auto& n = nodes_[i];
  ++n.stats.offered;
  if (sc_.run.queue_capacity > 0 && n.queue.size() >= sc_.run.queue_capacity) {
    ++n.stats.failed;
    ++n.stats.overflow;
    trace(t, i, "overflow");
    return;
  }
  n.queue.push_back(t);
  if (n.spec.traffic.kind != TrafficKind::Saturated) trace(t, i, "arrival");
  if (n.mode == Mode::Empty) next_frame(i, t);
}

void Kernel::next_frame(std::size_t i, std::int64_t t) {
  auto& n = nodes_[i];
  n.frame_attempts = 0;
  if (n.queue.empty()) {
    n.mode = Mode::Empty;
    return;
  }
  n.hol_since = t;
  n.mode = Mode::Wait;
  switch (n.spec.access) {
    case AccessMethod::Contention:
      draw(i, t);
      try_start(i, t);
      break;
    case AccessMethod::Scheduled:
      try_grant_tx(i, t);
      break;
    case AccessMethod::Polled:
      break;
  }
}

void Kernel::draw(std::size_t i, std::int64_t t) {
  auto& n = nodes_[i];
  if (n.script_pos < n.spec.backoff_script.size()) {
    n.bo = assign_backoff(n.bo, n.spec.backoff_script[n.script_pos++]);
  } else {
    n.bo = draw_backoff(n.bo, n.rng);
  }
  n.guard_window = kNoWindow;
  trace(t, i, "draw");
}

void Kernel::try_start(std::size_t i, std::int64_t t) {
  auto& n = nodes_[i];
  if (n.mode != Mode::Wait || n.queue.empty() || n.spec.access != AccessMethod::Contention) return;
  if (!contention_admissible(n) || n.guard_window == win_.serial || !active_.empty()) return;
  ++n.epoch;
  n.mode = Mode::Sifs;
  n.sifs_window = win_.serial;
  trace(t, i, "sifs");
  push(t + sc_.timing.psifs.count(), Ev::SlotTick, static_cast<int>(i), n.epoch, kSifsDone);
}

void Kernel::try_grant_tx(std::size_t i, std::int64_t t) {
  auto& n = nodes_[i];
  if (n.mode != Mode::Wait || n.queue.empty() || n.spec.access != AccessMethod::Scheduled) return;
  if (!active_.empty() || t + exchange_time(n) > n.grant_end) return;
  n.mode = Mode::TxPending;
  push(t, Ev::TxStart, static_cast<int>(i), 0, n.grant_end);
}

void Kernel::on_sifs_done(std::size_t i, std::int64_t t) {
  auto& n = nodes_[i];
  const std::optional<Micros> phase_end =
      win_.end == kForever ? std::nullopt : std::optional<Micros>(Micros{win_.end});
  if (guard_check(n.bo, Micros{t}, phase_end, Micros{n.frame_air}, Micros{ack_air_}, sc_.timing) ==
      GuardDecision::Lock) {
    n.bo = on_busy(n.bo);
    n.guard_window = win_.serial;
    n.mode = Mode::Wait;
    trace(t, i, "lock_guard");
    return;
  }
  if (n.bo.locked) {
    n.bo = unlock(n.bo);
    trace(t, i, "unlock");
  }
  n.mode = Mode::Countdown;
  push(t + sc_.timing.slot.count(), Ev::SlotTick, static_cast<int>(i), n.epoch, kSlotTick);
}

void Kernel::on_tick(std::size_t i, std::int64_t t) {
  auto& n = nodes_[i];
  const auto r = on_idle_slot(n.bo);
  n.bo = r.state;
  trace(t, i, "decrement");
  if (r.transmit) {
    n.mode = Mode::TxPending;
    push(t, Ev::TxStart, static_cast<int>(i), 0, win_.end);
  } else {
    push(t + sc_.timing.slot.count(), Ev::SlotTick, static_cast<int>(i), n.epoch, kSlotTick);
  }
}

void Kernel::on_data_start(std::size_t i, std::int64_t t, std::int64_t limit) {
  auto& n = nodes_[i];
  auto& session = sessions_[i];
  if (session.level != SecurityLevel::Unsecured && !session.ptk_active()) {
    throw Error(Errc::SimulationFault, "node " + std::to_string(n.spec.id) + " would send a secured frame without a PTK");
  }
  n.mode = Mode::Transmitting;
  n.limit = limit;
  ++n.frame_attempts;
  ++n.total_attempts;
  ++n.stats.attempts;
  n.in_flight = secure_frame(n.payload, session);
  trace(t, i, "tx_start");
  start_tx(t, TxKind::Data, static_cast<int>(i), n.frame_air, limit);
}

void Kernel::start_tx(std::int64_t t, TxKind kind, int node, std::int64_t duration, std::int64_t limit) {
  Tx tx{++tx_seq_, kind, node, t, t + duration, limit};
  for (auto& other : active_) {
    if (sc_.run.channel == ChannelMode::Ideal) {
      throw Error(Errc::SimulationFault, "overlapping transmissions at " + std::to_string(t) + " us in ideal mode");
    }
    other.collided = true;
    tx.collided = true;
  }
  const double ber = sc_.run.bit_error_rate;
  if (ber > 0 && (kind == TxKind::Data || kind == TxKind::Ack)) {
    const auto bits = kind == TxKind::Ack ? ack_bits_
                                          : ppdu_bit_length(sc_.phy, nodes_[static_cast<std::size_t>(node)].in_flight->to_body().size());
    tx.corrupted = uniform_unit(channel_rng_) >= std::pow(1.0 - ber, static_cast<double>(bits));
  }

  if (active_.empty()) busy_since_ = t;
  const auto counted = std::min(tx.end, end_) - t;
  busy_sum_ += counted;
  if (kind == TxKind::Data) nodes_[static_cast<std::size_t>(node)].stats.busy_us += counted;
  active_.push_back(tx);

  for (std::size_t j = 0; j < nodes_.size(); ++j) {
    auto& n = nodes_[j];
    if (kind == TxKind::Data && static_cast<int>(j) == node) continue;
    if (n.mode != Mode::Sifs && n.mode != Mode::Countdown) continue;
    n.bo = on_busy(n.bo);
    ++n.epoch;
    n.mode = Mode::Wait;
    trace(t, j, "lock_busy");
  }
  push(tx.end, Ev::TxEnd, node, tx.id);
}

void Kernel::on_tx_end(std::int64_t t, std::uint64_t id) {
  const auto it = std::find_if(active_.begin(), active_.end(), [id](const Tx& x) { return x.id == id; });
  const Tx tx = *it;
  active_.erase(it);
  if (active_.empty()) busy_union_ += t - busy_since_;
  if (tx.end > tx.limit) {
    throw Error(Errc::SimulationFault, "transmission ending at " + std::to_string(tx.end) +
                                           " us overruns its phase or grant (" + std::to_string(tx.limit) + ")");
  }
  const auto i = static_cast<std::size_t>(std::max(tx.node, 0));
  const auto psifs = sc_.timing.psifs.count();
  switch (tx.kind) {
    case TxKind::Data: {
      auto& n = nodes_[i];
      n.mode = Mode::AwaitAck;
      trace(t, i, "tx_end");
      if (tx.collided) ++n.stats.collided;
      const bool delivered = !tx.collided && !tx.corrupted && n.lost.count(n.total_attempts) == 0;
      if (delivered) {
        const auto body = admit_frame(*n.in_flight, sessions_[i]);
        if (body != n.payload) throw Error(Errc::SimulationFault, "hub admitted a different body");
        push(t + psifs, Ev::AckDue, tx.node, 0, kAckStart);
      } else {
        push(t + psifs + ack_air_ + sc_.timing.guard.count(), Ev::AckDue, tx.node, 0, kAckTimeout);
      }
      break;
    }
    case TxKind::Ack:
      if (tx.collided || tx.corrupted) {
        push(t + sc_.timing.guard.count(), Ev::AckDue, tx.node, 0, kAckTimeout);
      } else {
        success(i, t);
      }
      break;
    case TxKind::Poll: {
      auto& n = nodes_[i];
      if (n.mode == Mode::Wait && !n.queue.empty() && t + psifs + exchange_time(n) <= tx.limit) {
        n.mode = Mode::TxPending;
        push(t + psifs, Ev::TxStart, tx.node, 0, tx.limit);
      }
      break;
    }
    case TxKind::External:
      trace(t, kExternalId, "busy_end");
      break;
    case TxKind::Beacon:
      break;
  }
  wake_waiting(t);
}

void Kernel::on_poll_grant(std::size_t i, std::int64_t t, std::uint64_t type, std::int64_t end) {
  auto& n = nodes_[i];
  if (type == kAllocationGrant) {
    n.grant_end = end;
    trace(t, i, "allocation");
    try_grant_tx(i, t);
    return;
  }
  if (!active_.empty()) return;
  ++out_.stats.polls;
  trace(t, kHubId, "poll");
  start_tx(t, TxKind::Poll, static_cast<int>(i), ack_air_, end);
}

void Kernel::success(std::size_t i, std::int64_t t) {
  auto& n = nodes_[i];
  auto& s = n.stats;
  ++s.delivered;
  s.payload_bits += 8 * n.spec.payload_bytes;
  s.payload_time_us += 1000.0 * 8.0 * n.spec.payload_bytes / info_data_rate(sc_.phy, Component::Psdu);
  n.delay_sum += static_cast<double>(t - n.hol_since);
  n.bo = on_success(n.bo);
  trace(t, i, "success");
  retire_frame(i, t);
}

void Kernel::failure(std::size_t i, std::int64_t t) {
  auto& n = nodes_[i];
  n.bo = apply_failure(n.bo);
  trace(t, i, "failure");
  if (sc_.run.max_retries > 0 && n.frame_attempts > sc_.run.max_retries) {
    ++n.stats.failed;
    trace(t, i, "drop");
    retire_frame(i, t);
    return;
  }
  n.mode = Mode::Wait;
  if (n.spec.access == AccessMethod::Contention) {
    draw(i, t);
    try_start(i, t);
  } else if (n.spec.access == AccessMethod::Scheduled) {
    try_grant_tx(i, t);
  }
}

void Kernel::retire_frame(std::size_t i, std::int64_t t) {
  auto& n = nodes_[i];
  n.queue.pop_front();
  n.in_flight.reset();
  n.mode = Mode::Empty;
  if (n.spec.traffic.kind == TrafficKind::Saturated) {
    ++n.stats.offered;
    n.queue.push_back(t);
  }
  next_frame(i, t);
}

void Kernel::wake_waiting(std::int64_t t) {
  for (std::size_t j = 0; j < nodes_.size(); ++j) {
    if (nodes_[j].mode != Mode::Wait) continue;
    if (nodes_[j].spec.access == AccessMethod::Contention) {
      try_start(j, t);
    } else if (nodes_[j].spec.access == AccessMethod::Scheduled) {
      try_grant_tx(j, t);
    }
  }
}

}  // namespace

Micros frame_duration(const PhyConfig& cfg, std::size_t body_bytes) {
  return Micros{std::llround(frame_airtime(cfg, body_bytes).total().count())};
}

void validate(const Scenario& sc) {
  validate(sc.phy);
  sc.timing.validate();
  const auto& run = sc.run;
  if (run.duration <= Micros{0}) scenario_error("run duration must be positive");
  if (run.bit_error_rate < 0 || run.bit_error_rate >= 1) scenario_error("bit error rate must be in [0, 1)");
  if (run.max_retries < 0) scenario_error("max_retries must be >= 0");
  if (run.beacon_body_bytes < 0 || run.beacon_body_bytes > static_cast<int>(kMaxBodyBytes)) {
    scenario_error("beacon body must be 0..255 bytes");
  }

  const bool scripted = !sc.scripted_phases.empty();
  std::optional<PhaseLayout> layout;
  if (scripted) {
    auto phases = sc.scripted_phases;
    std::sort(phases.begin(), phases.end(), [](const auto& a, const auto& b) { return a.start < b.start; });
    Micros cursor{0};
    for (const auto& p : phases) {
      if (p.start < cursor || p.end <= p.start) scenario_error("scripted phases must be non-empty and must not overlap");
      cursor = p.end;
    }
    if (!sc.allocations.empty()) scenario_error("scheduled allocations need a superframe layout");
  } else {
    layout.emplace(build_layout(sc.superframe));
    validate_allocations(sc.allocations, *layout);
  }
  for (const auto& b : sc.busy) {
    if (b.start < Micros{0} || b.end <= b.start) scenario_error("busy intervals must have start < end");
  }

  if (run.channel == ChannelMode::Ideal && sc.nodes.size() > 1) {
    scenario_error("ideal channel mode allows a single contender; use collision mode for more nodes");
  }
  std::set<int> ids;
  for (const auto& n : sc.nodes) {
    const auto who = "node " + std::to_string(n.id);
    if (n.id < 1) scenario_error(who + ": node ids start at 1 (0 is the hub)");
    if (!ids.insert(n.id).second) scenario_error(who + ": duplicate id");
    validate(n.priority);
    const auto max_payload = static_cast<int>(kMaxBodyBytes - security_overhead(n.security));
    if (n.payload_bytes < 1 || n.payload_bytes > max_payload) {
      scenario_error(who + ": payload must be 1.." + std::to_string(max_payload) + " bytes at this security level");
    }
    if (n.traffic.kind == TrafficKind::Poisson && !(n.traffic.rate_per_s > 0)) {
      scenario_error(who + ": Poisson rate must be positive");
    }
    for (auto a : n.traffic.arrivals) {
      if (a < Micros{0}) scenario_error(who + ": arrival times must be >= 0");
    }
    for (int b : n.backoff_script) {
      if (b < 1 || b > n.priority.cw_max) scenario_error(who + ": scripted backoff outside [1, cw_max]");
    }
    for (int a : n.lost_attempts) {
      if (a < 1) scenario_error(who + ": lost attempts are numbered from 1");
    }
    if (n.group && n.security == SecurityLevel::Unsecured) {
      scenario_error(who + ": group keys need security level 1 or 2");
    }
    if (scripted && n.access != AccessMethod::Contention) {
      scenario_error(who + ": scripted phase timelines support contention access only");
    }
    if (layout && n.access == AccessMethod::Contention && layout->mode() != OperationalMode::BeaconWithBoundaries) {
      scenario_error(who + ": contention access needs beacon mode");
    }
    if (layout && n.access == AccessMethod::Scheduled &&
        layout->mode() == OperationalMode::NonBeaconWithoutBoundaries) {
      scenario_error(who + ": scheduled access needs superframe boundaries");
    }
    if (n.access == AccessMethod::Scheduled &&
        std::none_of(sc.allocations.begin(), sc.allocations.end(), [&](const auto& a) { return a.node_id == n.id; })) {
      scenario_error(who + ": scheduled access without an allocation");
    }
  }
  for (const auto& a : sc.allocations) {
    const auto it = std::find_if(sc.nodes.begin(), sc.nodes.end(), [&](const auto& n) { return n.id == a.node_id; });
    if (it == sc.nodes.end() || it->access != AccessMethod::Scheduled) {
      scenario_error("allocation for node " + std::to_string(a.node_id) + " needs a node with scheduled access");
    }
  }
}

RunResult run(const Scenario& scenario) { return Kernel(scenario).run(); }

std::vector<RunResult> run_seeds(const Scenario& scenario, const std::vector<std::uint64_t>& seeds, int threads) {
  validate(scenario);
  std::vector<RunResult> results(seeds.size());
  std::vector<std::exception_ptr> errors(seeds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < seeds.size(); k = next++) {
      try {
        Scenario copy = scenario;
        copy.run.seed = seeds[k];
        results[k] = run(copy);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const auto count = static_cast<std::size_t>(std::clamp(threads, 1, static_cast<int>(std::max<std::size_t>(seeds.size(), 1))));
  std::vector<std::thread> pool;
  for (std::size_t k = 1; k < count; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

namespace {

std::string stats_row(const NodeStats& s, std::uint64_t seed) {
  return std::to_string(seed) + ',' + (s.node < 0 ? std::string("all") : std::to_string(s.node)) + ',' +
         std::to_string(s.offered) + ',' + std::to_string(s.delivered) + ',' + std::to_string(s.failed) + ',' +
         std::to_string(s.collided) + ',' + std::to_string(s.attempts) + ',' + std::to_string(s.queued) + ',' +
         std::to_string(s.payload_bits) + ',' + fixed(s.efficiency, 4) + ',' + fixed(s.mean_access_delay_us, 1) +
         ',' + std::to_string(s.busy_us) + ',' + std::to_string(s.idle_us) + '\n';
}

}  // namespace

std::string stats_csv(const RunStats& stats, std::uint64_t seed) {
  std::string out(kStatsCsvHeader);
  out += '\n';
  for (const auto& s : stats.nodes) out += stats_row(s, seed);
  out += stats_row(stats.aggregate, seed);
  return out;
}

std::string stats_csv(const std::vector<RunResult>& runs, const std::vector<std::uint64_t>& seeds) {
  std::string out(kStatsCsvHeader);
  out += '\n';
  for (std::size_t k = 0; k < runs.size(); ++k) {
    for (const auto& s : runs[k].stats.nodes) out += stats_row(s, seeds[k]);
    out += stats_row(runs[k].stats.aggregate, seeds[k]);
  }
  return out;
}

std::string trace_csv(const std::vector<TraceEvent>& trace) {
  std::string out(kTraceHeader);
  out += '\n';
  for (const auto& e : trace) {
    out += format_trace_line(e);
    out += '\n';
  }
  return out;
}

std::vector<TraceEvent> trace_from_csv(std::string_view text) {
  std::vector<TraceEvent> events;
  bool header = true;
  for (auto line : split(text, '\n')) {
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    if (header) {
      header = false;
      if (line == kTraceHeader) continue;
    }
    events.push_back(parse_trace_line(line));
  }
  return events;
}

std::uint64_t trace_hash(const std::vector<TraceEvent>& trace) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : trace_csv(trace)) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace bansim
