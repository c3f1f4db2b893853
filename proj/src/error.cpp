#include "securescan/error.hpp"

namespace securescan {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::MalformedUrl: return "MalformedUrl";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::EmptyCorpus: return "EmptyCorpus";
    case ErrorKind::SingleClass: return "SingleClass";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::EmptyMatrix: return "EmptyMatrix";
    case ErrorKind::InvalidPolicy: return "InvalidPolicy";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::AuthError: return "AuthError";
    case ErrorKind::RateLimited: return "RateLimited";
    case ErrorKind::Transport: return "Transport";
    case ErrorKind::ModelMissing: return "ModelMissing";
    case ErrorKind::VersionMismatch: return "VersionMismatch";
    case ErrorKind::CorruptBundle: return "CorruptBundle";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace securescan
