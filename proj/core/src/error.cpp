#include "qcs/error.hpp"

namespace qcs {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidSupport: return "InvalidSupport";
    case ErrorCode::FrequencyOutOfRange: return "FrequencyOutOfRange";
    case ErrorCode::ModulationOverdrive: return "ModulationOverdrive";
    case ErrorCode::InvalidIntensity: return "InvalidIntensity";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::OutOfWindow: return "OutOfWindow";
    case ErrorCode::Unbounded: return "Unbounded";
    case ErrorCode::EmptyMeasurement: return "EmptyMeasurement";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::Unreachable: return "Unreachable";
    case ErrorCode::MissingField: return "MissingField";
    case ErrorCode::TypeMismatch: return "TypeMismatch";
    case ErrorCode::UnknownExperiment: return "UnknownExperiment";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace qcs
