#pragma once

#include <stdexcept>
#include <string>

namespace hdclust {

enum class ErrorKind {
  NotPositiveDefinite,
  DowndateBreaksPD,
  NoConvergence,
  DomainError,
  UnknownLabel,
  SameLabel,
  InvalidConfig,
  InvalidSpec,
  ParseError,
  RaggedRows,
  ConstantRow,
  Io,
};

const char* to_string(ErrorKind kind);

// Single exception type for the library; callers dispatch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::DowndateBreaksPD: return "DowndateBreaksPD";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::UnknownLabel: return "UnknownLabel";
    case ErrorKind::SameLabel: return "SameLabel";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::RaggedRows: return "RaggedRows";
    case ErrorKind::ConstantRow: return "ConstantRow";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace hdclust
