#include "aclrisk/error.hpp"

namespace aclrisk {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedDocument: return "MalformedDocument";
    case ErrorCode::NoPersonDetected: return "NoPersonDetected";
    case ErrorCode::AmbiguousPerson: return "AmbiguousPerson";
    case ErrorCode::EmptySource: return "EmptySource";
    case ErrorCode::FrameParseFailure: return "FrameParseFailure";
    case ErrorCode::GapTooLong: return "GapTooLong";
    case ErrorCode::AllFramesInvalid: return "AllFramesInvalid";
    case ErrorCode::DegenerateVector: return "DegenerateVector";
    case ErrorCode::WindowEmpty: return "WindowEmpty";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::InvalidGrade: return "InvalidGrade";
    case ErrorCode::InvalidMatrix: return "InvalidMatrix";
    case ErrorCode::OrderMismatch: return "OrderMismatch";
    case ErrorCode::ConsistencyFailure: return "ConsistencyFailure";
    case ErrorCode::InvalidScript: return "InvalidScript";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::Config: return "config";
    case Stage::Ingest: return "ingest";
    case Stage::Preprocess: return "preprocess";
    case Stage::Kinematics: return "kinematics";
    case Stage::Scoring: return "scoring";
    case Stage::Weighting: return "weighting";
    case Stage::Output: return "output";
  }
  return "unknown";
}

namespace {

std::string format_message(ErrorCode code, const std::string& message,
                           std::optional<long> frame) {
  std::string out{to_string(code)};
  out += ": ";
  out += message;
  if (frame) {
    out += " (frame " + std::to_string(*frame) + ")";
  }
  return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message, std::optional<long> frame)
    : std::runtime_error(format_message(code, message, frame)),
      code_(code),
      frame_(frame),
      detail_(message) {}

StageError::StageError(Stage stage, const Error& cause)
    : Error(cause.code(),
            "[" + std::string(to_string(stage)) + "] " + cause.detail(),
            cause.frame()),
      stage_(stage) {}

}  // namespace aclrisk
