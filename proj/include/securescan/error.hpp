#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace securescan {

enum class ErrorKind {
  EmptyInput,
  MalformedUrl,
  ParseError,
  EmptyCorpus,
  SingleClass,
  DimensionMismatch,
  LengthMismatch,
  EmptyMatrix,
  InvalidPolicy,
  InvalidArgument,
  AuthError,
  RateLimited,
  Transport,
  ModelMissing,
  VersionMismatch,
  CorruptBundle,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above so
/// callers (CLI exit codes, HTTP status mapping) can branch without parsing
/// messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace securescan
