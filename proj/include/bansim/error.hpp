#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bansim {

enum class Errc {
  InvalidConfig,
  FrameTooLong,
  PreambleMismatch,
  SfdMismatch,
  HeaderCheckMismatch,
  FcsMismatch,
  ParityMismatch,
  SpreadingMismatch,
  TruncatedFrame,
  TrailingData,
  InvalidField,
  PhyMismatch,
  InvalidLayout,
  OutOfRange,
  AllocationConflict,
  ProtocolOrder,
  MissingKey,
  KeyActive,
  DistributionRefused,
  LevelMismatch,
  TagFailure,
  Replay,
  InvalidScenario,
  SimulationFault,
};

/// Stable kebab-case name, used in CLI diagnostics.
std::string_view to_string(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }
  /// The message without the leading error kind.
  const char* detail() const noexcept { return what() + to_string(code_).size() + 2; }

 private:
  Errc code_;
};

}  // namespace bansim
