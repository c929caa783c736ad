// Non-fatal findings reported alongside extraction and metric results,
// one line per issue: `severity file:line:col message`.
#pragma once

#include <string>
#include <tuple>
#include <vector>

namespace m3 {

struct Diagnostic {
  enum class Severity { Error, Warning, Info };

  Severity severity = Severity::Warning;
  std::string file;
  std::size_t line = 0;
  std::size_t column = 0;
  std::string message;

  std::string to_string() const {
    const char* tag = severity == Severity::Error     ? "error"
                      : severity == Severity::Warning ? "warning"
                                                      : "info";
    return std::string(tag) + " " + file + ":" + std::to_string(line) + ":" +
           std::to_string(column) + " " + message;
  }

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
  friend bool operator<(const Diagnostic& a, const Diagnostic& b) {
    return std::tie(a.file, a.line, a.column, a.severity, a.message) <
           std::tie(b.file, b.line, b.column, b.severity, b.message);
  }
};

using Diagnostics = std::vector<Diagnostic>;

}  // namespace m3
