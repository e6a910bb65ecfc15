#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace flowspec {

enum class Severity { Error, Warning };

inline const char* to_string(Severity severity) {
  return severity == Severity::Error ? "error" : "warning";
}

/// Codes are stable strings; see docs/diagnostics.md.
struct Diagnostic {
  std::string code;
  Severity severity = Severity::Error;
  std::string location;
  std::string message;

  bool operator==(const Diagnostic&) const = default;
};

inline bool has_errors(const std::vector<Diagnostic>& diagnostics) {
  for (const auto& d : diagnostics) {
    if (d.severity == Severity::Error) return true;
  }
  return false;
}

inline std::string format_diagnostic(const Diagnostic& d) {
  return std::string(to_string(d.severity)) + ": " + d.code + " at " + d.location + ": " +
         d.message;
}

/// Base of every flowspec exception; `code()` is one of the documented codes.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

struct SourceSpan {
  std::string file;
  int line = 1;
  int column = 1;

  bool operator==(const SourceSpan&) const = default;
};

/// Error tied to a position in some input text.
class SyntaxError : public Error {
 public:
  SyntaxError(std::string code, const std::string& message, SourceSpan span)
      : Error(std::move(code), span.file + ":" + std::to_string(span.line) + ":" +
                                   std::to_string(span.column) + ": " + message),
        span_(std::move(span)) {}

  const SourceSpan& span() const { return span_; }

 private:
  SourceSpan span_;
};

/// A model parsed fine but failed validation.
class SemanticError : public Error {
 public:
  explicit SemanticError(std::vector<Diagnostic> diagnostics)
      : Error(diagnostics.empty() ? "SemanticError" : diagnostics.front().code,
              summarize(diagnostics)),
        diagnostics_(std::move(diagnostics)) {}

  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  static std::string summarize(const std::vector<Diagnostic>& diagnostics) {
    std::string out = "model is invalid";
    for (const auto& d : diagnostics) out += "\n  " + format_diagnostic(d);
    return out;
  }

  std::vector<Diagnostic> diagnostics_;
};

}  // namespace flowspec
