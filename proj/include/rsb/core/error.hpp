#pragma once

#include <stdexcept>
#include <string>

namespace rsb {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid parameters or malformed run configuration.
struct ConfigError : Error {
    using Error::Error;
};

// Requested problem exceeds a hard resource cap (Hilbert-space dimension,
// enumeration size, ensemble size).
struct CapExceeded : Error {
    using Error::Error;
};

// Effective transverse coefficient is exactly zero somewhere; the temporal
// coupling K defined by tanh(beta*K) = exp(-beta*|coeff|/M) has no finite
// solution in that case.
struct ZeroTransverseField : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

// File exists but its content does not match the expected schema/version.
struct SchemaError : Error {
    using Error::Error;
};

// Data has a valid schema but the wrong lattice shape for this run.
struct ShapeMismatch : Error {
    using Error::Error;
};

} // namespace rsb
