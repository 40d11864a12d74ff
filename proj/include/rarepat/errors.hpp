#pragma once

#include <stdexcept>
#include <string>

namespace rarepat {

/// Error taxonomy shared by the library and the CLI exit-code mapping.
enum class ErrorCategory {
  Parse,     // malformed input file (bench, config, pattern file)
  Validate,  // inconsistent inputs: bad arguments, stale artifacts, mismatches
  Resource,  // solver conflict/time budget exhausted
  Internal,  // invariant violation inside the library
  Io,        // file system failure
};

inline const char* to_string(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::Parse: return "parse";
    case ErrorCategory::Validate: return "validate";
    case ErrorCategory::Resource: return "resource";
    case ErrorCategory::Internal: return "internal";
    case ErrorCategory::Io: return "io";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory cat, const std::string& msg)
      : std::runtime_error(msg), cat_(cat) {}
  ErrorCategory category() const { return cat_; }

 private:
  ErrorCategory cat_;
};

struct ParseError : Error {
  ParseError(const std::string& msg, int line = 0, int column = 0)
      : Error(ErrorCategory::Parse,
              line > 0 ? "line " + std::to_string(line) +
                             (column > 0 ? ":" + std::to_string(column) : "") +
                             ": " + msg
                       : msg),
        line(line),
        column(column) {}
  int line;
  int column;
};

struct ValidationError : Error {
  explicit ValidationError(const std::string& msg)
      : Error(ErrorCategory::Validate, msg) {}
};

struct ResourceError : Error {
  explicit ResourceError(const std::string& msg)
      : Error(ErrorCategory::Resource, msg) {}
};

struct InternalError : Error {
  explicit InternalError(const std::string& msg)
      : Error(ErrorCategory::Internal, msg) {}
};

struct IoError : Error {
  explicit IoError(const std::string& msg) : Error(ErrorCategory::Io, msg) {}
};

}  // namespace rarepat
