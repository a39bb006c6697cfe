#include "vmoidx/error.hpp"

namespace vmoidx {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EpsTooLarge: return "EpsTooLarge";
    case ErrorCode::BoundaryPresent: return "BoundaryPresent";
    case ErrorCode::OutOfChart: return "OutOfChart";
    case ErrorCode::ZeroOnBoundary: return "ZeroOnBoundary";
    case ErrorCode::ClusterUnresolved: return "ClusterUnresolved";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::NotRegularValue: return "NotRegularValue";
    case ErrorCode::NonIntegerResult: return "NonIntegerResult";
    case ErrorCode::VanishingOnCircle: return "VanishingOnCircle";
    case ErrorCode::UnderResolved: return "UnderResolved";
    case ErrorCode::DegenerateZero: return "DegenerateZero";
    case ErrorCode::BallContainsOtherZero: return "BallContainsOtherZero";
    case ErrorCode::VanishingOnBoundary: return "VanishingOnBoundary";
    case ErrorCode::DegenerateBoundaryZero: return "DegenerateBoundaryZero";
    case ErrorCode::ZeroOutsideSubregions: return "ZeroOutsideSubregions";
    case ErrorCode::CollarTooNarrow: return "CollarTooNarrow";
    case ErrorCode::NotConstantOverGrid: return "NotConstantOverGrid";
    case ErrorCode::NormCollapse: return "NormCollapse";
    case ErrorCode::NonzeroIndex: return "NonzeroIndex";
    case ErrorCode::ZeroNorm: return "ZeroNorm";
    case ErrorCode::TopologicalObstruction: return "TopologicalObstruction";
    case ErrorCode::NonIntegrableDatum: return "NonIntegrableDatum";
    case ErrorCode::NotTangent: return "NotTangent";
    case ErrorCode::NotAdmissible: return "NotAdmissible";
    case ErrorCode::IndexMismatch: return "IndexMismatch";
    case ErrorCode::CancellationFailed: return "CancellationFailed";
    case ErrorCode::Unsupported: return "Unsupported";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

ErrorClass classify(ErrorCode code) {
  switch (code) {
    case ErrorCode::TopologicalObstruction:
    case ErrorCode::NonzeroIndex:
      return ErrorClass::Obstruction;
    case ErrorCode::ConfigError:
    case ErrorCode::ParseError:
    case ErrorCode::Unsupported:
      return ErrorClass::Config;
    default:
      return ErrorClass::Numerical;
  }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

TopologicalObstruction::TopologicalObstruction(int inward_index, int euler_characteristic)
    : Error(ErrorCode::TopologicalObstruction,
            "inward boundary index " + std::to_string(inward_index) +
                " differs from Euler characteristic " + std::to_string(euler_characteristic)),
      inward_index_(inward_index),
      euler_characteristic_(euler_characteristic) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace vmoidx
