#pragma once

#include <stdexcept>
#include <string>

namespace diractime {

/// Base of every error raised by the library. Messages are prefixed with the
/// owning module ("wavepacket: ...").
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input outside a documented validity range.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A numerical guard tripped: packet not localized, width under-resolved,
/// projection annihilated the field.
class GuardError : public Error {
public:
    using Error::Error;
};

/// Operation only defined in three dimensions was called on a 1D grid.
class UnsupportedDimensionError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Field strength beyond the sub-barrier regime: the barrier has no real turning points.
class OverBarrierError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Mandelstam-Tamm time requested for a stationary observable.
class UndefinedMtError : public Error {
public:
    using Error::Error;
};

}  // namespace diractime
