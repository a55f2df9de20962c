#include "bansim/error.hpp"

namespace bansim {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::InvalidConfig: return "invalid-config";
    case Errc::FrameTooLong: return "frame-too-long";
    case Errc::PreambleMismatch: return "preamble-mismatch";
    case Errc::SfdMismatch: return "sfd-mismatch";
    case Errc::HeaderCheckMismatch: return "header-check-mismatch";
    case Errc::FcsMismatch: return "fcs-mismatch";
    case Errc::ParityMismatch: return "parity-mismatch";
    case Errc::SpreadingMismatch: return "spreading-mismatch";
    case Errc::TruncatedFrame: return "truncated-frame";
    case Errc::TrailingData: return "trailing-data";
    case Errc::InvalidField: return "invalid-field";
    case Errc::PhyMismatch: return "phy-mismatch";
    case Errc::InvalidLayout: return "invalid-layout";
    case Errc::OutOfRange: return "out-of-range";
    case Errc::AllocationConflict: return "allocation-conflict";
    case Errc::ProtocolOrder: return "protocol-order";
    case Errc::MissingKey: return "missing-key";
    case Errc::KeyActive: return "key-active";
    case Errc::DistributionRefused: return "distribution-refused";
    case Errc::LevelMismatch: return "level-mismatch";
    case Errc::TagFailure: return "tag-failure";
    case Errc::Replay: return "replay";
    case Errc::InvalidScenario: return "invalid-scenario";
    case Errc::SimulationFault: return "simulation-fault";
  }
  return "unknown";
}

}  // namespace bansim
