#pragma once

#include <stdexcept>
#include <string>

namespace vmoidx {

enum class ErrorCode {
  EpsTooLarge,
  BoundaryPresent,
  OutOfChart,
  ZeroOnBoundary,
  ClusterUnresolved,
  BudgetExceeded,
  NotRegularValue,
  NonIntegerResult,
  VanishingOnCircle,
  UnderResolved,
  DegenerateZero,
  BallContainsOtherZero,
  VanishingOnBoundary,
  DegenerateBoundaryZero,
  ZeroOutsideSubregions,
  CollarTooNarrow,
  NotConstantOverGrid,
  NormCollapse,
  NonzeroIndex,
  ZeroNorm,
  TopologicalObstruction,
  NonIntegrableDatum,
  NotTangent,
  NotAdmissible,
  IndexMismatch,
  CancellationFailed,
  Unsupported,
  ConfigError,
  ParseError,
};

// Coarse classes used to map failures to process exit codes.
enum class ErrorClass { Obstruction, Numerical, Config };

const char* to_string(ErrorCode code);
ErrorClass classify(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class TopologicalObstruction : public Error {
 public:
  TopologicalObstruction(int inward_index, int euler_characteristic);
  int inward_index() const noexcept { return inward_index_; }
  int euler_characteristic() const noexcept { return euler_characteristic_; }

 private:
  int inward_index_;
  int euler_characteristic_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace vmoidx
