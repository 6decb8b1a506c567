#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace adapterforge {

enum class ErrorCode {
  Syntax,
  DupName,
  NoConcept,
  BadVersion,
  DupUse,
  BadConstraint,
  Unresolved,
  NoNode,
  MetaOnMeta,
  BadKind,
  NotAdaptable,
  Template,
  Narrow,
  Convert,
  Io,
  InvalidSpec,
  Lock,
  Corrupt,
  NoEntry,
  Parse,
  InterfaceMismatch,
  Config,
};

/// Stable textual code, e.g. "E_SYNTAX".
std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }
  /// Message without the code prefix.
  const std::string& detail() const { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

/// A spec-language error with a 1-based source position.
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, std::string file, std::size_t line, std::size_t column,
             const std::string& message);

  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::string file_;
  std::size_t line_;
  std::size_t column_;
};

}  // namespace adapterforge
