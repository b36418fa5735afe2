#pragma once

#include <stdexcept>
#include <string>

namespace bcycle {

/// Broad failure classes. The CLI maps each onto a process exit code.
enum class ErrorKind {
  input,       // malformed files, violated preconditions
  numerical,   // non-convergence, undefined phase
  simulation,  // Monte-Carlo run produced no usable trials
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(ErrorKind::input, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what)
      : Error(ErrorKind::numerical, what) {}
};

class SimulationError : public Error {
 public:
  explicit SimulationError(const std::string& what)
      : Error(ErrorKind::simulation, what) {}
};

}  // namespace bcycle
