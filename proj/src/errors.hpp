#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace agnostic {

enum class ErrorCode {
  Config = 1,
  InsufficientSamples,
  EmptyInput,
  ZeroWeightMass,
  ConvergenceFailure,
  SingularMatrix,
  DegradedRegime,
  DimensionCap,
  EmptySurvivorSet,
  StalledProgress,
  Io,
  Spec,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string msg)
      : std::runtime_error(std::move(msg)), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

#define AGNOSTIC_DEFINE_ERROR(Name)                       \
  class Name : public Error {                             \
   public:                                                \
    explicit Name(std::string msg)                        \
        : Error(ErrorCode::Name, std::move(msg)) {}       \
  }

class ConfigError : public Error {
 public:
  explicit ConfigError(std::string msg) : Error(ErrorCode::Config, std::move(msg)) {}
};
AGNOSTIC_DEFINE_ERROR(InsufficientSamples);
AGNOSTIC_DEFINE_ERROR(EmptyInput);
AGNOSTIC_DEFINE_ERROR(ZeroWeightMass);
AGNOSTIC_DEFINE_ERROR(ConvergenceFailure);
AGNOSTIC_DEFINE_ERROR(SingularMatrix);
AGNOSTIC_DEFINE_ERROR(DegradedRegime);
AGNOSTIC_DEFINE_ERROR(DimensionCap);
AGNOSTIC_DEFINE_ERROR(EmptySurvivorSet);
AGNOSTIC_DEFINE_ERROR(StalledProgress);

class IoError : public Error {
 public:
  explicit IoError(std::string msg) : Error(ErrorCode::Io, std::move(msg)) {}
};
class SpecError : public Error {
 public:
  explicit SpecError(std::string msg) : Error(ErrorCode::Spec, std::move(msg)) {}
};

#undef AGNOSTIC_DEFINE_ERROR

}  // namespace agnostic
