#pragma once

#include <string>
#include <vector>

#include "pasym/json_io.hpp"

namespace pasym {

enum class Severity { kWarning, kError };

inline const char* to_string(Severity s) {
  return s == Severity::kError ? "error" : "warning";
}

/// One finding from the lint rules (R1..R7) or a fitting warning (W*).
struct Diagnostic {
  std::string rule;
  Severity severity = Severity::kError;
  std::string message;
  std::vector<std::string> columns;

  Json to_json() const {
    Json j;
    j["rule"] = rule;
    j["severity"] = to_string(severity);
    j["message"] = message;
    j["columns"] = columns;
    return j;
  }
};

}  // namespace pasym
