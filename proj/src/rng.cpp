#include "bifwatch/rng.hpp"

#include "bifwatch/error.hpp"

namespace bifwatch {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t unit,
                          std::uint64_t stream) noexcept {
  return mix64(mix64(master ^ mix64(unit)) + stream);
}

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Divergence: return "Divergence";
    case ErrorKind::EmptyTrajectory: return "EmptyTrajectory";
    case ErrorKind::DegenerateSamples: return "DegenerateSamples";
    case ErrorKind::AllZero: return "AllZero";
    case ErrorKind::TooFewPoints: return "TooFewPoints";
    case ErrorKind::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorKind::EmptyPpd: return "EmptyPpd";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

DivergenceError::DivergenceError(std::uint64_t step)
    : Error(ErrorKind::Divergence,
            "state became non-finite at step " + std::to_string(step)),
      step_(step) {}

StageError::StageError(std::string stage, const Error& cause)
    : Error(cause.kind(), stage + ": " + cause.what()),
      stage_(std::move(stage)) {}

}  // namespace bifwatch
