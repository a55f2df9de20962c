#include "bansim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "bansim/error.hpp"
#include "bansim/format.hpp"

namespace bansim {
namespace {

struct Line {
  int number;
  std::string_view key;
  std::string_view value;
};

[[noreturn]] void fail(int line, const std::string& what) {
  throw Error(Errc::InvalidScenario, "line " + std::to_string(line) + ": " + what);
}

std::vector<std::string_view> words(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
    const auto start = i;
    while (i < text.size() && text[i] != ' ' && text[i] != '\t') ++i;
    if (i > start) out.push_back(text.substr(start, i - start));
  }
  return out;
}

template <typename F>
auto at_line(int line, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == Errc::InvalidScenario) throw;
    fail(line, e.what());
  }
}

std::int64_t as_int(const Line& l) { return at_line(l.number, [&] { return parse_int(l.value); }); }
double as_double(const Line& l) { return at_line(l.number, [&] { return parse_double(l.value); }); }

bool as_bool(const Line& l) {
  if (l.value == "true" || l.value == "yes" || l.value == "1") return true;
  if (l.value == "false" || l.value == "no" || l.value == "0") return false;
  fail(l.number, "expected true or false for '" + std::string(l.key) + "'");
}

AccessPhaseType as_phase_type(const Line& l) {
  if (l.value == "I" || l.value == "1") return AccessPhaseType::TypeI;
  if (l.value == "II" || l.value == "2") return AccessPhaseType::TypeII;
  fail(l.number, "phase type must be I or II");
}

PhaseKind as_phase_kind(int line, std::string_view name) {
  for (auto k : {PhaseKind::EAP1, PhaseKind::RAP1, PhaseKind::EAP2, PhaseKind::RAP2, PhaseKind::CAP}) {
    if (to_string(k) == name) return k;
  }
  fail(line, "scripted phases must be eap1, rap1, eap2, rap2 or cap, got '" + std::string(name) + "'");
}

std::vector<Micros> as_times(int line, std::string_view list) {
  std::vector<Micros> out;
  for (auto item : split(list, ';')) {
    item = trim(item);
    if (!item.empty()) out.push_back(Micros{at_line(line, [&] { return parse_int(item); })});
  }
  return out;
}

std::vector<int> as_ints(int line, std::string_view list) {
  std::vector<int> out;
  for (auto item : split(list, ';')) {
    item = trim(item);
    if (!item.empty()) out.push_back(static_cast<int>(at_line(line, [&] { return parse_int(item); })));
  }
  return out;
}

struct PendingNode {
  int line;
  NodeSpec spec;
  int user_priority = 0;
};

class Parser {
 public:
  explicit Parser(const PhyRegistry& registry) : registry_(registry) {}

  ScenarioFile parse(std::string_view text);

 private:
  void phy(const Line& l);
  void superframe(const Line& l);
  void csma(const Line& l);
  void nodes(const Line& l);
  void security(const Line& l);
  void run(const Line& l);
  [[noreturn]] void unknown(const Line& l) {
    fail(l.number, "unknown key '" + std::string(l.key) + "' in [" + section_ + "]");
  }

  const PhyRegistry& registry_;
  ScenarioFile out_;
  std::string section_;
  std::map<std::string, int> section_lines_;
  bool phy_set_ = false;
  std::vector<PendingNode> nodes_;
  std::map<int, PriorityClass> priority_overrides_;
  std::map<int, std::pair<SecurityLevel, MasterKeySource>> security_;
  std::map<int, int> group_of_;
  std::map<std::string, int> seen_keys_;
};

ScenarioFile Parser::parse(std::string_view text) {
  int number = 0;
  for (auto raw : split(text, '\n')) {
    ++number;
    auto line = raw;
    if (const auto c = line.find('#'); c != std::string_view::npos) line = line.substr(0, c);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(number, "unterminated section header");
      section_ = std::string(trim(line.substr(1, line.size() - 2)));
      static const char* known[] = {"phy", "superframe", "csma", "nodes", "security", "run"};
      if (std::find(std::begin(known), std::end(known), section_) == std::end(known)) {
        fail(number, "unknown section [" + section_ + "]");
      }
      if (section_lines_.count(section_) != 0) fail(number, "section [" + section_ + "] repeated");
      section_lines_[section_] = number;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(number, "expected 'key = value'");
    const Line l{number, trim(line.substr(0, eq)), trim(line.substr(eq + 1))};
    if (l.key.empty()) fail(number, "missing key");
    if (section_.empty()) fail(number, "key outside any section");

    static const char* repeatable[] = {"allocation", "phase", "busy", "node"};
    const bool repeats = std::find(std::begin(repeatable), std::end(repeatable), l.key) != std::end(repeatable);
    const auto full = section_ + "." + std::string(l.key);
    if (!repeats && !seen_keys_.emplace(full, number).second) {
      fail(number, "'" + std::string(l.key) + "' already set on line " + std::to_string(seen_keys_[full]));
    }

    if (section_ == "phy") phy(l);
    else if (section_ == "superframe") superframe(l);
    else if (section_ == "csma") csma(l);
    else if (section_ == "nodes") nodes(l);
    else if (section_ == "security") security(l);
    else run(l);
  }
  if (!phy_set_) fail(number, "missing [phy] config");

  auto& sc = out_.scenario;
  for (auto& p : nodes_) {
    auto prio = default_priority(p.user_priority);
    if (const auto it = priority_overrides_.find(p.user_priority); it != priority_overrides_.end()) prio = it->second;
    p.spec.priority = prio;
    if (const auto it = security_.find(p.spec.id); it != security_.end()) {
      p.spec.security = it->second.first;
      p.spec.mk = it->second.second;
    }
    if (const auto it = group_of_.find(p.spec.id); it != group_of_.end()) p.spec.group = it->second;
    sc.nodes.push_back(p.spec);
  }
  for (const auto& [id, setting] : security_) {
    (void)setting;
    if (std::none_of(sc.nodes.begin(), sc.nodes.end(), [id = id](const auto& n) { return n.id == id; })) {
      fail(section_lines_["security"], "security settings for unknown node " + std::to_string(id));
    }
  }

  try {
    validate(sc);
  } catch (const Error& e) {
    const bool layout = e.code() == Errc::InvalidLayout || e.code() == Errc::AllocationConflict;
    const char* where = layout ? "superframe" : "nodes";
    int line = section_lines_.count(where) != 0 ? section_lines_[where] : 1;
    if (!layout && std::string_view(e.what()).find("node ") == std::string_view::npos) {
      line = section_lines_.count("run") != 0 ? section_lines_["run"] : line;
    }
    fail(line, e.code() == Errc::InvalidScenario ? e.detail() : e.what());
  }
  return std::move(out_);
}

void Parser::phy(const Line& l) {
  if (l.key != "config") unknown(l);
  const auto* cfg = registry_.try_find(l.value);
  if (cfg == nullptr) fail(l.number, "no PHY configuration named '" + std::string(l.value) + "'");
  out_.scenario.phy = *cfg;
  phy_set_ = true;
}

void Parser::superframe(const Line& l) {
  auto& sf = out_.scenario.superframe;
  auto count = [&] {
    const auto v = as_int(l);
    if (v < 0 || v > 1'000'000) fail(l.number, std::string(l.key) + " out of range");
    return static_cast<int>(v);
  };
  if (l.key == "mode") {
    if (l.value == "beacon") sf.mode = OperationalMode::BeaconWithBoundaries;
    else if (l.value == "nonbeacon") sf.mode = OperationalMode::NonBeaconWithBoundaries;
    else if (l.value == "nonbeacon-unbounded") sf.mode = OperationalMode::NonBeaconWithoutBoundaries;
    else fail(l.number, "mode must be beacon, nonbeacon or nonbeacon-unbounded");
  } else if (l.key == "slot_us") {
    sf.slot_length = Micros{count()};
  } else if (l.key == "slots") {
    sf.slots_per_superframe = count();
  } else if (l.key == "beacon_slots") {
    sf.beacon_slots = count();
  } else if (l.key == "eap1") {
    sf.eap1 = count();
  } else if (l.key == "rap1") {
    sf.rap1 = count();
  } else if (l.key == "type_a") {
    sf.type_a = count();
  } else if (l.key == "eap2") {
    sf.eap2 = count();
  } else if (l.key == "rap2") {
    sf.rap2 = count();
  } else if (l.key == "type_b") {
    sf.type_b = count();
  } else if (l.key == "cap") {
    sf.cap = count();
  } else if (l.key == "type_a_label") {
    sf.type_a_label = as_phase_type(l);
  } else if (l.key == "type_b_label") {
    sf.type_b_label = as_phase_type(l);
  } else if (l.key == "nonbeacon_type") {
    sf.nonbeacon_type = as_phase_type(l);
  } else if (l.key == "beacon_period") {
    sf.beacon_period = count();
  } else if (l.key == "beacon_prohibited") {
    sf.beacon_prohibited = as_bool(l);
  } else if (l.key == "allocation") {
    // node start_slot length [period=M] [offset=K] [direction=D]
    const auto w = words(l.value);
    if (w.size() < 3) fail(l.number, "allocation needs: node start_slot length [period=] [offset=] [direction=]");
    ScheduledAllocation a;
    a.node_id = static_cast<int>(at_line(l.number, [&] { return parse_int(w[0]); }));
    a.start_slot = static_cast<int>(at_line(l.number, [&] { return parse_int(w[1]); }));
    a.length_slots = static_cast<int>(at_line(l.number, [&] { return parse_int(w[2]); }));
    for (std::size_t k = 3; k < w.size(); ++k) {
      const auto eq = w[k].find('=');
      const auto key = w[k].substr(0, eq);
      const auto val = eq == std::string_view::npos ? std::string_view{} : w[k].substr(eq + 1);
      if (key == "period") a.period = static_cast<int>(at_line(l.number, [&] { return parse_int(val); }));
      else if (key == "offset") a.offset = static_cast<int>(at_line(l.number, [&] { return parse_int(val); }));
      else if (key == "direction") a.direction = at_line(l.number, [&] { return parse_direction(val); });
      else fail(l.number, "unknown allocation attribute '" + std::string(key) + "'");
    }
    out_.scenario.allocations.push_back(a);
  } else if (l.key == "phase") {
    // kind start_us end_us
    const auto w = words(l.value);
    if (w.size() != 3) fail(l.number, "phase needs: kind start_us end_us");
    PhaseWindow p{as_phase_kind(l.number, w[0]), Micros{at_line(l.number, [&] { return parse_int(w[1]); })},
                  Micros{at_line(l.number, [&] { return parse_int(w[2]); })}};
    if (p.end <= p.start) fail(l.number, "phase must end after it starts");
    for (const auto& q : out_.scenario.scripted_phases) {
      if (p.start < q.end && q.start < p.end) fail(l.number, "phase overlaps an earlier phase");
    }
    out_.scenario.scripted_phases.push_back(p);
  } else if (l.key == "busy") {
    const auto w = words(l.value);
    if (w.size() != 2) fail(l.number, "busy needs: start_us end_us");
    BusyInterval b{Micros{at_line(l.number, [&] { return parse_int(w[0]); })},
                   Micros{at_line(l.number, [&] { return parse_int(w[1]); })}};
    if (b.end <= b.start) fail(l.number, "busy interval must end after it starts");
    out_.scenario.busy.push_back(b);
  } else {
    unknown(l);
  }
}

void Parser::csma(const Line& l) {
  auto& t = out_.scenario.timing;
  if (l.key == "psifs_us") {
    t.psifs = Micros{as_int(l)};
  } else if (l.key == "slot_us") {
    t.slot = Micros{as_int(l)};
  } else if (l.key == "guard_us") {
    t.guard = Micros{as_int(l)};
  } else if (l.key.starts_with("priority.")) {
    const auto up = static_cast<int>(at_line(l.number, [&] { return parse_int(l.key.substr(9)); }));
    const auto w = words(l.value);
    if (w.size() != 2) fail(l.number, "priority override needs: cw_min cw_max");
    PriorityClass p{up, static_cast<int>(at_line(l.number, [&] { return parse_int(w[0]); })),
                    static_cast<int>(at_line(l.number, [&] { return parse_int(w[1]); }))};
    at_line(l.number, [&] {
      validate(p);
      return 0;
    });
    priority_overrides_[up] = p;
  } else {
    unknown(l);
  }
  at_line(l.number, [&] {
    t.validate();
    return 0;
  });
}

void Parser::nodes(const Line& l) {
  // node = <id> priority=P access=A traffic=T payload=B backoff=a;b lost=a;b
  if (l.key != "node") unknown(l);
  const auto w = words(l.value);
  if (w.empty()) fail(l.number, "node needs an id");
  PendingNode p;
  p.line = l.number;
  p.spec.id = static_cast<int>(at_line(l.number, [&] { return parse_int(w[0]); }));
  for (std::size_t k = 1; k < w.size(); ++k) {
    const auto eq = w[k].find('=');
    if (eq == std::string_view::npos) fail(l.number, "expected attr=value, got '" + std::string(w[k]) + "'");
    const auto key = w[k].substr(0, eq);
    const auto val = w[k].substr(eq + 1);
    auto num = [&] { return at_line(l.number, [&] { return parse_int(val); }); };
    if (key == "priority") {
      p.user_priority = static_cast<int>(num());
      if (p.user_priority < 0 || p.user_priority > kHighestUserPriority) fail(l.number, "priority must be 0..7");
    } else if (key == "access") {
      if (val == "contention") p.spec.access = AccessMethod::Contention;
      else if (val == "polled") p.spec.access = AccessMethod::Polled;
      else if (val == "scheduled") p.spec.access = AccessMethod::Scheduled;
      else fail(l.number, "access must be contention, polled or scheduled");
    } else if (key == "traffic") {
      auto& tr = p.spec.traffic;
      if (val == "saturated") {
        tr.kind = TrafficKind::Saturated;
      } else if (val.starts_with("poisson:")) {
        tr.kind = TrafficKind::Poisson;
        tr.rate_per_s = at_line(l.number, [&] { return parse_double(val.substr(8)); });
      } else if (val.starts_with("scripted:")) {
        tr.kind = TrafficKind::Scripted;
        tr.arrivals = as_times(l.number, val.substr(9));
      } else {
        fail(l.number, "traffic must be saturated, poisson:<per second> or scripted:<t1;t2;...>");
      }
    } else if (key == "payload") {
      p.spec.payload_bytes = static_cast<int>(num());
    } else if (key == "backoff") {
      p.spec.backoff_script = as_ints(l.number, val);
    } else if (key == "lost") {
      p.spec.lost_attempts = as_ints(l.number, val);
    } else {
      fail(l.number, "unknown node attribute '" + std::string(key) + "'");
    }
  }
  for (const auto& q : nodes_) {
    if (q.spec.id == p.spec.id) fail(l.number, "node " + std::to_string(p.spec.id) + " already defined on line " + std::to_string(q.line));
  }
  nodes_.push_back(std::move(p));
}

void Parser::security(const Line& l) {
  // node.<id> = <level> [mk-source]     group.<gid> = <id>;<id>;...
  if (l.key.starts_with("node.")) {
    const auto id = static_cast<int>(at_line(l.number, [&] { return parse_int(l.key.substr(5)); }));
    const auto w = words(l.value);
    if (w.empty() || w.size() > 2) fail(l.number, "expected: <level> [preshared|unauthenticated]");
    const auto level = at_line(l.number, [&] { return parse_security_level(w[0]); });
    auto mk = MasterKeySource::Preshared;
    if (w.size() == 2) mk = at_line(l.number, [&] { return parse_master_key_source(w[1]); });
    security_[id] = {level, mk};
  } else if (l.key.starts_with("group.")) {
    const auto gid = static_cast<int>(at_line(l.number, [&] { return parse_int(l.key.substr(6)); }));
    for (const int id : as_ints(l.number, l.value)) {
      if (!group_of_.emplace(id, gid).second) fail(l.number, "node " + std::to_string(id) + " is already in a group");
    }
  } else {
    unknown(l);
  }
}

void Parser::run(const Line& l) {
  auto& r = out_.scenario.run;
  if (l.key == "seed") {
    r.seed = static_cast<std::uint64_t>(as_int(l));
  } else if (l.key == "duration_us") {
    r.duration = Micros{as_int(l)};
  } else if (l.key == "duration_s") {
    r.duration = Micros{std::llround(as_double(l) * 1e6)};
  } else if (l.key == "channel") {
    if (l.value == "ideal") r.channel = ChannelMode::Ideal;
    else if (l.value == "collision") r.channel = ChannelMode::Collision;
    else fail(l.number, "channel must be ideal or collision");
  } else if (l.key == "ber") {
    r.bit_error_rate = as_double(l);
  } else if (l.key == "queue_capacity") {
    const auto v = as_int(l);
    if (v < 0) fail(l.number, "queue_capacity must be >= 0");
    r.queue_capacity = static_cast<std::size_t>(v);
  } else if (l.key == "max_retries") {
    r.max_retries = static_cast<int>(as_int(l));
  } else if (l.key == "beacon_body") {
    r.beacon_body_bytes = static_cast<int>(as_int(l));
  } else if (l.key == "trace_events") {
    r.record_trace = as_bool(l);
  } else if (l.key == "stats") {
    out_.stats_path = std::filesystem::path(std::string(l.value));
  } else if (l.key == "trace") {
    out_.trace_path = std::filesystem::path(std::string(l.value));
  } else {
    unknown(l);
  }
}

}  // namespace

ScenarioFile parse_scenario(std::string_view text, const PhyRegistry& registry) { return Parser(registry).parse(text); }

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::InvalidConfig, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ScenarioFile load_scenario(const std::filesystem::path& path, const PhyRegistry& registry) {
  try {
    return parse_scenario(read_text_file(path), registry);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

}  // namespace bansim
