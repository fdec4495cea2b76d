#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace aclrisk {

enum class ErrorCode {
  MalformedDocument,
  NoPersonDetected,
  AmbiguousPerson,
  EmptySource,
  FrameParseFailure,
  GapTooLong,
  AllFramesInvalid,
  DegenerateVector,
  WindowEmpty,
  OutOfRange,
  InvalidGrade,
  InvalidMatrix,
  OrderMismatch,
  ConsistencyFailure,
  InvalidScript,
  InvalidConfig,
  IoFailure,
};

std::string_view to_string(ErrorCode code);

// Pipeline stage an assessment error originated in.
enum class Stage { Config, Ingest, Preprocess, Kinematics, Scoring, Weighting, Output };

std::string_view to_string(Stage stage);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<long> frame = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  // Frame index the error refers to, when it is frame specific.
  std::optional<long> frame() const noexcept { return frame_; }
  // Message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::optional<long> frame_;
  std::string detail_;
};

// An upstream error annotated with the one pipeline stage it came from.
class StageError : public Error {
 public:
  StageError(Stage stage, const Error& cause);

  Stage stage() const noexcept { return stage_; }

 private:
  Stage stage_;
};

}  // namespace aclrisk
