#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace monge {

enum class ErrorCode {
  NoSignChange,
  MaxIterations,
  MaxDepth,
  NegativeIntegrand,
  OutOfRange,
  DomainError,
  NonPositiveDensity,
  NotADensity,
  InvalidSpec,
  CapacityError,
  InvalidPerturbation,
  InsufficientRows,
  ConfigError,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library; callers branch on code().
class MongeError : public std::runtime_error {
 public:
  MongeError(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace monge
