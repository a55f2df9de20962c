#include "bansim/security.hpp"

#include <algorithm>
#include <string>

#include "bansim/error.hpp"

namespace bansim {
namespace {

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kPresharedDomain = 0x50534B0000000000ULL;
constexpr std::uint64_t kUnauthDomain = 0x55414B0000000000ULL;
constexpr std::uint64_t kGroupDomain = 0x47544B0000000000ULL;

void put_u32(Bytes& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

std::uint32_t get_u32(std::span<const std::uint8_t> in) {
  return (std::uint32_t{in[0]} << 24) | (std::uint32_t{in[1]} << 16) | (std::uint32_t{in[2]} << 8) | in[3];
}

}  // namespace

std::string_view to_string(SecurityLevel level) {
  switch (level) {
    case SecurityLevel::Unsecured: return "unsecured";
    case SecurityLevel::AuthOnly: return "auth";
    case SecurityLevel::AuthEncrypt: return "auth-encrypt";
  }
  return "?";
}

SecurityLevel parse_security_level(std::string_view text) {
  if (text == "0" || text == "unsecured") return SecurityLevel::Unsecured;
  if (text == "1" || text == "auth") return SecurityLevel::AuthOnly;
  if (text == "2" || text == "auth-encrypt") return SecurityLevel::AuthEncrypt;
  throw Error(Errc::InvalidConfig, "security level must be 0, 1 or 2, got '" + std::string(text) + "'");
}

std::string_view to_string(MasterKeySource source) {
  switch (source) {
    case MasterKeySource::Absent: return "absent";
    case MasterKeySource::Preshared: return "preshared";
    case MasterKeySource::UnauthenticatedAssociation: return "unauthenticated";
  }
  return "?";
}

MasterKeySource parse_master_key_source(std::string_view text) {
  for (auto s : {MasterKeySource::Absent, MasterKeySource::Preshared, MasterKeySource::UnauthenticatedAssociation}) {
    if (to_string(s) == text) return s;
  }
  throw Error(Errc::InvalidConfig, "unknown master key source '" + std::string(text) + "'");
}

std::uint64_t TestKeyDerivation::derive(std::uint64_t key, std::uint64_t context) const {
  return mix64(mix64(key) ^ (context * 0xD6E8FEB86659FD93ULL));
}

void TestCipher::apply(std::uint64_t key, std::uint32_t counter, std::span<std::uint8_t> data) const {
  std::uint64_t block = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (i % 8 == 0) block = mix64(key ^ (std::uint64_t{counter} << 32) ^ (i / 8));
    data[i] ^= static_cast<std::uint8_t>(block >> (8 * (i % 8)));
  }
}

std::uint32_t TestCipher::tag(std::uint64_t key, std::uint32_t counter, SecurityLevel level,
                              std::span<const std::uint8_t> data) const {
  std::uint64_t h = 0xCBF29CE484222325ULL ^ mix64(key);
  auto feed = [&h](std::uint8_t b) {
    h ^= b;
    h *= 0x100000001B3ULL;
  };
  for (int shift = 24; shift >= 0; shift -= 8) feed(static_cast<std::uint8_t>(counter >> shift));
  feed(static_cast<std::uint8_t>(level));
  for (auto b : data) feed(b);
  h = mix64(h ^ key);
  return static_cast<std::uint32_t>(h ^ (h >> 32));
}

const FrameCipher& default_cipher() {
  static const TestCipher cipher;
  return cipher;
}

KeyManager::KeyManager(int hub_id, std::shared_ptr<const KeyDerivation> kdf)
    : hub_id_(hub_id), kdf_(kdf ? std::move(kdf) : std::make_shared<TestKeyDerivation>()) {}

SecuritySession KeyManager::associate(int node_id, SecurityLevel level, MasterKeySource mk) {
  if (associated_.count(node_id) != 0) {
    throw Error(Errc::ProtocolOrder, "node " + std::to_string(node_id) + " is already associated");
  }
  SecuritySession s;
  s.node_id = node_id;
  s.hub_id = hub_id_;
  s.level = level;
  if (level != SecurityLevel::Unsecured) {
    const auto pair = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(hub_id_)) << 32) |
                      static_cast<std::uint32_t>(node_id);
    if (mk == MasterKeySource::Preshared) {
      s.mk = MasterKeySource::Preshared;
      s.mk_id = kdf_->derive(kPresharedDomain, pair);
    } else {
      s.mk = MasterKeySource::UnauthenticatedAssociation;
      s.mk_id = kdf_->derive(kUnauthDomain ^ ++unauth_associations_, pair);
    }
    establish_ptk(s);
  }
  associated_.insert(node_id);
  return s;
}

void KeyManager::establish_ptk(SecuritySession& s) {
  if (s.mk == MasterKeySource::Absent) throw Error(Errc::MissingKey, "no master key for node " + std::to_string(s.node_id));
  if (s.ptk) throw Error(Errc::KeyActive, "node " + std::to_string(s.node_id) + " already has an active PTK");
  auto& last = node_sessions_[s.node_id];
  const std::uint32_t counter = std::max(s.sessions_started, last) + 1;
  const auto id = kdf_->derive(s.mk_id, counter);
  if (!issued_ptks_.insert(id).second) throw Error(Errc::KeyActive, "derived PTK id was already issued");
  last = counter;
  s.sessions_started = counter;
  s.ptk = PtkState{id, counter};
  s.tx_counter = 0;
  s.rx_highest.reset();
}

void KeyManager::end_session(SecuritySession& s) {
  s.ptk.reset();
  s.gtk.reset();
  s.group_id.reset();
  s.tx_counter = 0;
  s.rx_highest.reset();
}

void KeyManager::disassociate(SecuritySession& s) {
  end_session(s);
  associated_.erase(s.node_id);
}

GroupKeyState KeyManager::distribute_gtk(int group_id, std::span<SecuritySession* const> members) {
  GroupKeyState state;
  state.group_id = group_id;
  if (members.empty()) return state;
  for (const auto* m : members) {
    if (m->level == SecurityLevel::Unsecured || !m->ptk) {
      throw Error(Errc::DistributionRefused,
                  "node " + std::to_string(m->node_id) + " has no active PTK for group " + std::to_string(group_id));
    }
  }
  const auto epoch = ++group_epochs_[group_id];
  const auto gtk = kdf_->derive(kGroupDomain ^ static_cast<std::uint32_t>(hub_id_),
                                (static_cast<std::uint64_t>(static_cast<std::uint32_t>(group_id)) << 32) | epoch);
  state.gtk = gtk;
  for (auto* m : members) {
    m->gtk = gtk;
    m->group_id = group_id;
    state.members.insert(m->node_id);
  }
  return state;
}

std::size_t security_overhead(SecurityLevel level) {
  return level == SecurityLevel::Unsecured ? 0 : kSecurityCounterBytes + kSecurityTagBytes;
}

Bytes SecuredFrame::to_body() const {
  if (level == SecurityLevel::Unsecured) return payload;
  Bytes out;
  out.reserve(payload.size() + security_overhead(level));
  put_u32(out, counter);
  out.insert(out.end(), payload.begin(), payload.end());
  put_u32(out, tag);
  return out;
}

SecuredFrame SecuredFrame::from_body(std::span<const std::uint8_t> body, SecurityLevel level) {
  SecuredFrame f;
  f.level = level;
  if (level == SecurityLevel::Unsecured) {
    f.payload.assign(body.begin(), body.end());
    return f;
  }
  if (body.size() < security_overhead(level)) throw Error(Errc::TruncatedFrame, "secured body too short");
  f.counter = get_u32(body.first(kSecurityCounterBytes));
  f.payload.assign(body.begin() + kSecurityCounterBytes, body.end() - kSecurityTagBytes);
  f.tag = get_u32(body.last(kSecurityTagBytes));
  return f;
}

SecuredFrame secure_frame(std::span<const std::uint8_t> body, SecuritySession& s, const FrameCipher& cipher) {
  SecuredFrame f;
  f.level = s.level;
  f.payload.assign(body.begin(), body.end());
  if (s.level == SecurityLevel::Unsecured) return f;
  if (!s.ptk) throw Error(Errc::MissingKey, "secured frame from node " + std::to_string(s.node_id) + " without a PTK");
  f.counter = ++s.tx_counter;
  if (s.level == SecurityLevel::AuthEncrypt) cipher.apply(s.ptk->key_id, f.counter, f.payload);
  f.tag = cipher.tag(s.ptk->key_id, f.counter, f.level, f.payload);
  return f;
}

Bytes admit_frame(const SecuredFrame& f, SecuritySession& s, const FrameCipher& cipher) {
  if (f.level != s.level) {
    throw Error(Errc::LevelMismatch, "frame at level " + std::string(to_string(f.level)) + ", session at " +
                                         std::string(to_string(s.level)));
  }
  if (s.level == SecurityLevel::Unsecured) return f.payload;
  if (!s.ptk) throw Error(Errc::MissingKey, "no PTK to admit a secured frame");
  if (cipher.tag(s.ptk->key_id, f.counter, f.level, f.payload) != f.tag) {
    throw Error(Errc::TagFailure, "authentication tag mismatch");
  }
  if (s.rx_highest && f.counter <= *s.rx_highest) {
    throw Error(Errc::Replay, "counter " + std::to_string(f.counter) + " not above " + std::to_string(*s.rx_highest));
  }
  s.rx_highest = f.counter;
  Bytes out = f.payload;
  if (s.level == SecurityLevel::AuthEncrypt) cipher.apply(s.ptk->key_id, f.counter, out);
  return out;
}

}  // namespace bansim
