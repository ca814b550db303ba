#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ntan {

enum class ErrorCode {
  Parse = 1,
  UnknownIdentifier,
  UnboundVariable,
  DivisionByZero,
  Evaluation,
  InvalidArgument,
  GeodesicEscape,
  IntegrationTolerance,
  FrameDegenerate,
  Unsupported,
  Validation,
  Io,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Syntax errors carry the byte offset into the source text.
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, const std::string& message, std::size_t offset)
      : Error(code, message + " at offset " + std::to_string(offset)), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace ntan
