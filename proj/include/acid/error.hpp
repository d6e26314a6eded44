#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace acid {

enum class ErrorKind {
  NotARepository,
  CorruptObject,
  EmptyHistory,
  EmptyTree,
  EmptyDenominator,
  MissingPrediction,
  DuplicateOracleEntry,
  ManifestUnreadable,
  AuthRequired,
  FormatError,
  RuleSyntax,
  ProcessFailed,
  Io,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotARepository: return "NotARepository";
    case ErrorKind::CorruptObject: return "CorruptObject";
    case ErrorKind::EmptyHistory: return "EmptyHistory";
    case ErrorKind::EmptyTree: return "EmptyTree";
    case ErrorKind::EmptyDenominator: return "EmptyDenominator";
    case ErrorKind::MissingPrediction: return "MissingPrediction";
    case ErrorKind::DuplicateOracleEntry: return "DuplicateOracleEntry";
    case ErrorKind::ManifestUnreadable: return "ManifestUnreadable";
    case ErrorKind::AuthRequired: return "AuthRequired";
    case ErrorKind::FormatError: return "FormatError";
    case ErrorKind::RuleSyntax: return "RuleSyntax";
    case ErrorKind::ProcessFailed: return "ProcessFailed";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a kind so callers (and the
/// CLI) can branch on it without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace acid
