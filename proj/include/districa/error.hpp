#ifndef DISTRICA_ERROR_HPP
#define DISTRICA_ERROR_HPP

#include <stdexcept>
#include <string>

namespace districa {

enum class ErrorKind {
  InvalidInput,
  NumericalFailure,
  RankDeficient,
  DegenerateDirection,
  ExtractionFailure,
  GenerationFailure,
  InvalidReference,
  Config,
  Io,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid input";
    case ErrorKind::NumericalFailure: return "numerical failure";
    case ErrorKind::RankDeficient: return "rank deficient";
    case ErrorKind::DegenerateDirection: return "degenerate direction";
    case ErrorKind::ExtractionFailure: return "extraction failure";
    case ErrorKind::GenerationFailure: return "generation failure";
    case ErrorKind::InvalidReference: return "invalid reference";
    case ErrorKind::Config: return "config error";
    case ErrorKind::Io: return "I/O error";
  }
  return "unknown";
}

/// Single exception type for the library; `kind()` distinguishes the failure class.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) throw Error(kind, what);
}

}  // namespace districa

#endif  // DISTRICA_ERROR_HPP
