#include "popup/errors.hpp"

namespace popup {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::IsometryViolation: return "IsometryViolation";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::DegenerateStar: return "DegenerateStar";
    case ErrorKind::InvalidAssembly: return "InvalidAssembly";
    case ErrorKind::RankDeficientFit: return "RankDeficientFit";
    case ErrorKind::DomainExceeded: return "DomainExceeded";
    case ErrorKind::OrderingViolation: return "OrderingViolation";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::MaxIterations: return "MaxIterations";
    case ErrorKind::Unattainable: return "Unattainable";
    case ErrorKind::SelfIntersection: return "SelfIntersection";
    case ErrorKind::EmptyNetwork: return "EmptyNetwork";
    case ErrorKind::TopologyBroken: return "TopologyBroken";
    case ErrorKind::StitchMismatch: return "StitchMismatch";
    case ErrorKind::DegeneratePanel: return "DegeneratePanel";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace popup
