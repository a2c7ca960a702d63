#pragma once

#include <stdexcept>
#include <string>

namespace cpwm {

// Error taxonomy shared by all modules. `kind` maps 1:1 onto the CLI
// exit codes, so library consumers can report failures mechanically.
enum class ErrorKind {
  validation,     // bad model/config/input, sequencing misuse     -> exit 1
  divergence,     // field blow-up or non-finite values            -> exit 2
  comparison,     // benchmark comparison failed                   -> exit 3
  nonconvergence, // convergence cycle hit its iteration cap       -> exit 4
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind k, std::string msg, std::string key = {})
      : std::runtime_error(std::move(msg)), kind(k), key(std::move(key)) {}
  ErrorKind kind;
  // Offending config key, when the failure is attributable to one.
  std::string key;
};

inline int exit_code(ErrorKind k) {
  switch (k) {
  case ErrorKind::validation: return 1;
  case ErrorKind::divergence: return 2;
  case ErrorKind::comparison: return 3;
  case ErrorKind::nonconvergence: return 4;
  }
  return 1;
}

[[noreturn]] inline void fail_validation(const std::string& msg, const std::string& key = {}) {
  throw Error(ErrorKind::validation, msg, key);
}

} // namespace cpwm
