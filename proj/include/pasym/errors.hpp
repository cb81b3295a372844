#pragma once

#include <stdexcept>
#include <string>

namespace pasym {

/// Base for all recoverable domain errors. The CLI maps these to exit code 2.
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Target dimension not in the rational span of the inputs. This is a
/// physical finding (a missing dimensional constant), not a crash.
struct InfeasibleError : DomainError {
  using DomainError::DomainError;
};

/// Summands with different dimensions where one shared dimension is required.
struct MixedDimsError : DomainError {
  using DomainError::DomainError;
};

/// A quantity carries the wrong dimension for the operation.
struct DimensionError : DomainError {
  using DomainError::DomainError;
};

/// Data does not conform to the declared feature schema.
struct SchemaMismatchError : DomainError {
  using DomainError::DomainError;
};

/// Coincident points in the pendulum simulator (separation below guard).
struct SingularityError : DomainError {
  using DomainError::DomainError;
};

/// A training loss or state value diverged.
struct NonFiniteError : DomainError {
  using DomainError::DomainError;
};

/// Input width does not match a network's input layer.
struct WidthMismatchError : DomainError {
  using DomainError::DomainError;
};

/// A units class or dataset has no samples to fit statistics from.
struct EmptyClassError : DomainError {
  using DomainError::DomainError;
};

}  // namespace pasym
