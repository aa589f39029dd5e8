#pragma once

#include <stdexcept>
#include <string>

namespace jssr {

// Validation failures: a precondition of an operation was violated.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimMismatch : ValidationError {
    using ValidationError::ValidationError;
};

struct LevelsExceedResolution : ValidationError {
    using ValidationError::ValidationError;
};

struct TooSmall : ValidationError {
    using ValidationError::ValidationError;
};

struct TooFewSamples : ValidationError {
    using ValidationError::ValidationError;
};

struct EmptySamples : ValidationError {
    using ValidationError::ValidationError;
};

struct EmptyLandmarks : ValidationError {
    using ValidationError::ValidationError;
};

struct NonPositiveParam : ValidationError {
    using ValidationError::ValidationError;
};

struct ConfigError : ValidationError {
    using ValidationError::ValidationError;
};

// File and format problems, kept distinct from validation so the CLI can
// report them with a different exit code.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace jssr
