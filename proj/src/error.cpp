#include "monge/error.hpp"

namespace monge {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NoSignChange: return "NoSignChange";
    case ErrorCode::MaxIterations: return "MaxIterations";
    case ErrorCode::MaxDepth: return "MaxDepth";
    case ErrorCode::NegativeIntegrand: return "NegativeIntegrand";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::NonPositiveDensity: return "NonPositiveDensity";
    case ErrorCode::NotADensity: return "NotADensity";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::CapacityError: return "CapacityError";
    case ErrorCode::InvalidPerturbation: return "InvalidPerturbation";
    case ErrorCode::InsufficientRows: return "InsufficientRows";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

void fail(ErrorCode code, const std::string& what) {
  throw MongeError(code, std::string(to_string(code)) + ": " + what);
}

}  // namespace monge
