#pragma once

#include <stdexcept>
#include <string>

namespace tkz {

/// Broad failure classes. Each maps to one CLI exit code.
enum class ErrorKind {
  Config,        // exit 2
  Numeric,       // exit 3
  Degenerate,    // exit 3
  Inconclusive,  // exit 4
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept {
    switch (kind_) {
      case ErrorKind::Config: return 2;
      case ErrorKind::Numeric:
      case ErrorKind::Degenerate: return 3;
      case ErrorKind::Inconclusive: return 4;
    }
    return 1;
  }

 private:
  ErrorKind kind_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& w) : Error(ErrorKind::Config, w) {}
};

struct NumericError : Error {
  explicit NumericError(const std::string& w) : Error(ErrorKind::Numeric, w) {}
};

/// Evaluation at a pole, at z_i = 0 with a fractional exponent, or on z_i = z_j.
struct SingularPointError : NumericError {
  explicit SingularPointError(const std::string& w) : NumericError(w) {}
};

/// Transport step collapse close to the singular locus.
struct ProximityError : NumericError {
  explicit ProximityError(const std::string& w) : NumericError(w) {}
};

/// A substituted factor is not component-isolated (its leading term is not a single monomial).
struct DegenerateError : Error {
  explicit DegenerateError(const std::string& w) : Error(ErrorKind::Degenerate, w) {}
};

struct InconclusiveError : Error {
  explicit InconclusiveError(const std::string& w) : Error(ErrorKind::Inconclusive, w) {}
};

}  // namespace tkz
