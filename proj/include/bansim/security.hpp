#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string_view>
#include <vector>

#include "bansim/bits.hpp"

namespace bansim {

enum class SecurityLevel : std::uint8_t { Unsecured = 0, AuthOnly = 1, AuthEncrypt = 2 };

std::string_view to_string(SecurityLevel level);
SecurityLevel parse_security_level(std::string_view text);  // "0".."2" or the names

enum class MasterKeySource { Absent, Preshared, UnauthenticatedAssociation };

std::string_view to_string(MasterKeySource source);
MasterKeySource parse_master_key_source(std::string_view text);

struct PtkState {
  std::uint64_t key_id = 0;
  std::uint32_t session_counter = 0;
  friend bool operator==(const PtkState&, const PtkState&) = default;
};

struct SecuritySession {
  int node_id = 0;
  int hub_id = 0;
  SecurityLevel level = SecurityLevel::Unsecured;
  MasterKeySource mk = MasterKeySource::Absent;
  std::uint64_t mk_id = 0;
  std::optional<PtkState> ptk;
  std::uint32_t sessions_started = 0;
  std::uint32_t tx_counter = 0;                  // last counter sent
  std::optional<std::uint32_t> rx_highest;       // last counter admitted
  std::optional<std::uint64_t> gtk;
  std::optional<int> group_id;

  bool ptk_active() const { return ptk.has_value(); }
};

struct GroupKeyState {
  int group_id = 0;
  std::optional<std::uint64_t> gtk;  // empty for an empty group
  std::set<int> members;
};

/// Keyed hash used for every derived key id.
class KeyDerivation {
 public:
  virtual ~KeyDerivation() = default;
  virtual std::uint64_t derive(std::uint64_t key, std::uint64_t context) const = 0;
};

/// splitmix64 finalizer over key and context; not a cryptographic KDF.
class TestKeyDerivation final : public KeyDerivation {
 public:
  std::uint64_t derive(std::uint64_t key, std::uint64_t context) const override;
};

/// Reversible keyed transform plus a 32-bit authentication tag.
class FrameCipher {
 public:
  virtual ~FrameCipher() = default;
  virtual void apply(std::uint64_t key, std::uint32_t counter, std::span<std::uint8_t> data) const = 0;
  virtual std::uint32_t tag(std::uint64_t key, std::uint32_t counter, SecurityLevel level,
                            std::span<const std::uint8_t> data) const = 0;
};

/// XOR keystream and FNV-style tag; deterministic, for simulation only.
class TestCipher final : public FrameCipher {
 public:
  void apply(std::uint64_t key, std::uint32_t counter, std::span<std::uint8_t> data) const override;
  std::uint32_t tag(std::uint64_t key, std::uint32_t counter, SecurityLevel level,
                    std::span<const std::uint8_t> data) const override;
};

const FrameCipher& default_cipher();

/// Hub-side key store: tracks associations and every PTK issued in a run.
class KeyManager {
 public:
  explicit KeyManager(int hub_id = 0, std::shared_ptr<const KeyDerivation> kdf = nullptr);

  int hub_id() const { return hub_id_; }

  /// Level 0 gives a session without keys. Otherwise an MK is activated
  /// (preshared, or created by unauthenticated association when `mk` is
  /// Absent) and a PTK established. Throws protocol-order on re-association.
  SecuritySession associate(int node_id, SecurityLevel level, MasterKeySource mk = MasterKeySource::Preshared);

  /// Throws missing-key without an MK and key-active with a live PTK.
  void establish_ptk(SecuritySession& s);

  /// Retires the PTK and any GTK; the MK stays for the next session.
  void end_session(SecuritySession& s);

  /// Ends the session and forgets the association.
  void disassociate(SecuritySession& s);

  /// Throws distribution-refused if any member lacks an active PTK.
  GroupKeyState distribute_gtk(int group_id, std::span<SecuritySession* const> members);

  bool associated(int node_id) const { return associated_.count(node_id) != 0; }
  std::size_t ptks_issued() const { return issued_ptks_.size(); }

 private:
  int hub_id_;
  std::shared_ptr<const KeyDerivation> kdf_;
  std::set<int> associated_;
  std::set<std::uint64_t> issued_ptks_;
  std::map<int, std::uint32_t> group_epochs_;
  std::map<int, std::uint32_t> node_sessions_;  // survives disassociation
  std::uint64_t unauth_associations_ = 0;
};

inline constexpr std::size_t kSecurityCounterBytes = 4;
inline constexpr std::size_t kSecurityTagBytes = 4;

/// Bytes added to the frame body at a given level.
std::size_t security_overhead(SecurityLevel level);

struct SecuredFrame {
  SecurityLevel level = SecurityLevel::Unsecured;
  std::uint32_t counter = 0;
  Bytes payload;  // ciphertext at level 2
  std::uint32_t tag = 0;

  /// Level 0: payload. Otherwise counter || payload || tag, big-endian.
  Bytes to_body() const;
  static SecuredFrame from_body(std::span<const std::uint8_t> body, SecurityLevel level);
  friend bool operator==(const SecuredFrame&, const SecuredFrame&) = default;
};

/// Throws missing-key when the session's level needs a PTK it lacks.
SecuredFrame secure_frame(std::span<const std::uint8_t> body, SecuritySession& s,
                          const FrameCipher& cipher = default_cipher());

/// Throws level-mismatch, tag-failure, then replay, in that order.
Bytes admit_frame(const SecuredFrame& frame, SecuritySession& s, const FrameCipher& cipher = default_cipher());

}  // namespace bansim
