#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gaugelab {

enum class ErrorCode {
  InvalidInterval,
  InvalidTag,
  InvalidPartition,
  InvalidArgument,
  GaugeNonPositive,
  EvalDomain,
  TagOnBoundary,
  NotMergeable,
  DepthExceeded,
  NonFiniteSum,
  OracleMissing,
  MonotonicityViolated,
  UnknownId,
  BadParams,
  NoReference,
  Config,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInterval: return "InvalidInterval";
    case ErrorCode::InvalidTag: return "InvalidTag";
    case ErrorCode::InvalidPartition: return "InvalidPartition";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::GaugeNonPositive: return "GaugeNonPositive";
    case ErrorCode::EvalDomain: return "EvalDomain";
    case ErrorCode::TagOnBoundary: return "TagOnBoundary";
    case ErrorCode::NotMergeable: return "NotMergeable";
    case ErrorCode::DepthExceeded: return "DepthExceeded";
    case ErrorCode::NonFiniteSum: return "NonFiniteSum";
    case ErrorCode::OracleMissing: return "OracleMissing";
    case ErrorCode::MonotonicityViolated: return "MonotonicityViolated";
    case ErrorCode::UnknownId: return "UnknownId";
    case ErrorCode::BadParams: return "BadParams";
    case ErrorCode::NoReference: return "NoReference";
    case ErrorCode::Config: return "Config";
  }
  return "Unknown";
}

// Single exception type for the library; callers dispatch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace gaugelab
