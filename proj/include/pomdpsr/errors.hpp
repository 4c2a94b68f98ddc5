#pragma once

#include <stdexcept>
#include <string>

namespace pomdpsr {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A model or model file violates a structural invariant (row sums, ranges, dimensions).
class ModelError : public Error {
  public:
    using Error::Error;
};

/// belief_update was asked for an observation that has zero probability under (b, a).
class ImpossibleObservation : public Error {
  public:
    using Error::Error;
};

/// improve_from_graph received values whose direction disagrees with the set kind.
class KindMismatch : public Error {
  public:
    using Error::Error;
};

/// An iterative solver hit its iteration cap before reaching the requested tolerance.
class NonConvergence : public Error {
  public:
    NonConvergence(const std::string& what, double residual)
        : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
    double residual() const noexcept { return residual_; }

  private:
    double residual_;
};

class SingularSystem : public Error {
  public:
    using Error::Error;
};

class AlreadyExpanded : public Error {
  public:
    using Error::Error;
};

class NoReachableFringe : public Error {
  public:
    using Error::Error;
};

class ParticleDepletion : public Error {
  public:
    using Error::Error;
};

/// Invalid experiment configuration or command-line input.
class ConfigError : public Error {
  public:
    using Error::Error;
};

}  // namespace pomdpsr
