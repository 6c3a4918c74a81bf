#pragma once

#include <stdexcept>
#include <string>

namespace curvlab {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed arguments: wrong dimensions, non-finite entries, bad ranges.
struct InputError : Error {
    using Error::Error;
};

// A metric (or weight) failed to be positive definite or is too ill-conditioned.
struct DegenerateMetricError : Error {
    using Error::Error;
};

// A documented precondition of an operation does not hold.
struct PreconditionError : Error {
    using Error::Error;
};

// Suite configuration problem (unknown key, unparsable value, failed hypothesis).
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace curvlab
