#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace bifwatch {

enum class ErrorKind {
  InvalidArgument,
  Divergence,
  EmptyTrajectory,
  DegenerateSamples,
  AllZero,
  TooFewPoints,
  DegenerateGeometry,
  EmptyPpd,
  Io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Thrown by the integrator when the state stops being finite.
class DivergenceError : public Error {
 public:
  explicit DivergenceError(std::uint64_t step);
  std::uint64_t step() const noexcept { return step_; }

 private:
  std::uint64_t step_;
};

// Any error escaping a pipeline stage, tagged with the stage name.
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& cause);
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace bifwatch
