#include <doctest.h>

#include <random>
#include <set>

#include "bansim/error.hpp"
#include "bansim/security.hpp"

using namespace bansim;

namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::InvalidConfig;  // sentinel: nothing thrown
}

const Bytes kBody{1, 2, 3, 4, 5, 6, 7, 8};

}  // namespace

TEST_CASE("level names and overhead") {
  CHECK(parse_security_level("2") == SecurityLevel::AuthEncrypt);
  CHECK(parse_security_level("auth") == SecurityLevel::AuthOnly);
  CHECK_THROWS_AS(parse_security_level("3"), Error);
  CHECK(security_overhead(SecurityLevel::Unsecured) == 0);
  CHECK(security_overhead(SecurityLevel::AuthOnly) == 8);
  CHECK(parse_master_key_source("unauthenticated") == MasterKeySource::UnauthenticatedAssociation);
}

TEST_CASE("level 0 needs no keys") {
  KeyManager km;
  auto s = km.associate(1, SecurityLevel::Unsecured);
  CHECK_FALSE(s.ptk_active());
  auto f = secure_frame(kBody, s);
  CHECK(f.to_body() == kBody);
  CHECK(admit_frame(f, s) == kBody);
}

TEST_CASE("association order") {
  KeyManager km;
  auto s = km.associate(1, SecurityLevel::AuthOnly);
  CHECK(s.ptk_active());
  CHECK(code_of([&] { km.associate(1, SecurityLevel::AuthOnly); }) == Errc::ProtocolOrder);
  CHECK(code_of([&] { km.establish_ptk(s); }) == Errc::KeyActive);
  const auto first = s.ptk->key_id;
  km.disassociate(s);
  CHECK_FALSE(km.associated(1));
  CHECK_FALSE(s.ptk_active());
  auto again = km.associate(1, SecurityLevel::AuthOnly);
  CHECK(again.ptk_active());
  CHECK(again.ptk->key_id != first);
}

TEST_CASE("unauthenticated association creates a usable MK") {
  KeyManager km;
  auto s = km.associate(3, SecurityLevel::AuthEncrypt, MasterKeySource::Absent);
  CHECK(s.mk == MasterKeySource::UnauthenticatedAssociation);
  CHECK(s.ptk_active());
}

TEST_CASE("encrypt, tag and recover") {
  KeyManager km;
  auto tx = km.associate(1, SecurityLevel::AuthEncrypt);
  auto rx = tx;
  const auto f = secure_frame(kBody, tx);
  CHECK(f.payload != kBody);
  CHECK(f.to_body().size() == kBody.size() + 8);
  const auto parsed = SecuredFrame::from_body(f.to_body(), SecurityLevel::AuthEncrypt);
  CHECK(parsed == f);
  CHECK(admit_frame(parsed, rx) == kBody);
  auto tampered = f;
  tampered.payload[0] ^= 1;
  auto rx2 = tx;
  CHECK(code_of([&] { admit_frame(tampered, rx2); }) == Errc::TagFailure);
  auto plain = f;
  plain.level = SecurityLevel::Unsecured;
  CHECK(code_of([&] { admit_frame(plain, rx2); }) == Errc::LevelMismatch);
}

TEST_CASE("GTK needs every member keyed") {
  KeyManager km;
  auto a = km.associate(1, SecurityLevel::AuthOnly);
  auto b = km.associate(2, SecurityLevel::AuthOnly);
  std::vector<SecuritySession*> both{&a, &b};
  auto g = km.distribute_gtk(5, both);
  CHECK(g.gtk.has_value());
  CHECK(a.gtk == g.gtk);
  CHECK(b.group_id == 5);
  CHECK(g.members == std::set<int>{1, 2});
  CHECK_FALSE(km.distribute_gtk(6, {}).gtk.has_value());
  km.end_session(b);
  CHECK_FALSE(b.gtk.has_value());
  CHECK(code_of([&] { km.distribute_gtk(5, both); }) == Errc::DistributionRefused);
}

TEST_CASE("property: no secured frame leaves without a PTK") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    KeyManager km;
    const auto level = rng() & 1U ? SecurityLevel::AuthOnly : SecurityLevel::AuthEncrypt;
    auto s = km.associate(1, level);
    for (int op = 0; op < 50; ++op) {
      switch (rng() % 3) {
        case 0:
          km.end_session(s);
          break;
        case 1:
          if (!s.ptk_active()) km.establish_ptk(s);
          break;
        default:
          if (s.ptk_active()) {
            CHECK_NOTHROW(secure_frame(kBody, s));
          } else {
            CHECK(code_of([&] { secure_frame(kBody, s); }) == Errc::MissingKey);
          }
      }
    }
  }
}

TEST_CASE("property: PTKs never repeat across 1000 sessions") {
  KeyManager km;
  std::set<std::uint64_t> ids;
  std::vector<SecuritySession> ss;
  for (int n = 1; n <= 50; ++n) ss.push_back(km.associate(n, SecurityLevel::AuthOnly));
  for (auto& s : ss) ids.insert(s.ptk->key_id);
  for (int round = 1; round < 20; ++round) {
    for (auto& s : ss) {
      km.end_session(s);
      km.establish_ptk(s);
      ids.insert(s.ptk->key_id);
    }
  }
  CHECK(ids.size() == 1000);
  CHECK(km.ptks_issued() == 1000);
}

TEST_CASE("property: replays and cross-session frames are refused") {
  KeyManager km;
  auto tx = km.associate(1, SecurityLevel::AuthOnly);
  auto rx = tx;
  std::vector<SecuredFrame> sent;
  for (int i = 0; i < 20; ++i) sent.push_back(secure_frame(kBody, tx));
  for (const auto& f : sent) CHECK_NOTHROW(admit_frame(f, rx));
  for (const auto& f : sent) CHECK(code_of([&] { admit_frame(f, rx); }) == Errc::Replay);

  const auto old = secure_frame(kBody, tx);
  km.end_session(tx);
  km.establish_ptk(tx);
  auto rx_new = tx;
  CHECK(code_of([&] { admit_frame(old, rx_new); }) == Errc::TagFailure);

  auto other = km.associate(2, SecurityLevel::AuthOnly);
  const auto foreign = secure_frame(kBody, other);
  CHECK(code_of([&] { admit_frame(foreign, rx_new); }) == Errc::TagFailure);
}
