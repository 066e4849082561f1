#pragma once

#include <stdexcept>
#include <string>

namespace invsq {

enum class ErrorKind {
  Domain,
  InvalidParameter,
  HardyViolation,
  GridMismatch,
  Convergence,
  InvalidSpec,
  ZeroField,
  ExponentWindow,
  InadmissiblePair,
  InsufficientSampling,
  TailNotConverged,
  Config,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace invsq
