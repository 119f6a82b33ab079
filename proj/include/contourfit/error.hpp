#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace contourfit {

enum class ErrorCode {
  DegenerateQuintuple,
  NotAnEllipse,
  TooFewPoints,
  EmptyCloud,
  EmptyIntersections,
  NoEnclosingEllipse,
  NoInliers,
  EmptyInput,
  SpecInvalid,
  ConstantImage,
  NoForeground,
  NoEdges,
  UnknownAlgorithm,
  InvalidArgument,
  ParseError,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// what() is "<code>: <message>".
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), message_(message) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace contourfit
