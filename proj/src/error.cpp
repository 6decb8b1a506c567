#include "adapterforge/error.hpp"

namespace adapterforge {

std::string_view to_string(ErrorCode code)
{
  switch (code) {
    case ErrorCode::Syntax: return "E_SYNTAX";
    case ErrorCode::DupName: return "E_DUP_NAME";
    case ErrorCode::NoConcept: return "E_NO_CONCEPT";
    case ErrorCode::BadVersion: return "E_BAD_VERSION";
    case ErrorCode::DupUse: return "E_DUP_USE";
    case ErrorCode::BadConstraint: return "E_BAD_CONSTRAINT";
    case ErrorCode::Unresolved: return "E_UNRESOLVED";
    case ErrorCode::NoNode: return "E_NO_NODE";
    case ErrorCode::MetaOnMeta: return "E_META_ON_META";
    case ErrorCode::BadKind: return "E_BAD_KIND";
    case ErrorCode::NotAdaptable: return "E_NOT_ADAPTABLE";
    case ErrorCode::Template: return "E_TEMPLATE";
    case ErrorCode::Narrow: return "E_NARROW";
    case ErrorCode::Convert: return "E_CONVERT";
    case ErrorCode::Io: return "E_IO";
    case ErrorCode::InvalidSpec: return "E_INVALID_SPEC";
    case ErrorCode::Lock: return "E_LOCK";
    case ErrorCode::Corrupt: return "E_CORRUPT";
    case ErrorCode::NoEntry: return "E_NO_ENTRY";
    case ErrorCode::Parse: return "E_PARSE";
    case ErrorCode::InterfaceMismatch: return "E_INTERFACE_MISMATCH";
    case ErrorCode::Config: return "E_CONFIG";
  }
  return "E_UNKNOWN";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message)
{
}

namespace {

std::string position_prefix(const std::string& file, std::size_t line, std::size_t column)
{
  return (file.empty() ? std::string("<input>") : file) + ":" + std::to_string(line) + ":" +
         std::to_string(column);
}

}  // namespace

ParseError::ParseError(ErrorCode code, std::string file, std::size_t line, std::size_t column,
                       const std::string& message)
    : Error(code, position_prefix(file, line, column) + ": " + message),
      file_(std::move(file)),
      line_(line),
      column_(column)
{
}

}  // namespace adapterforge
