#pragma once

#include <stdexcept>
#include <string>

namespace adiapass {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// bad argument: s outside [0,1], bad level index, non-positive mu, ...
struct DomainError : Error {
    using Error::Error;
};

// two level pairs cross at (numerically) the same chirp frequency
struct A1Violation : Error {
    using Error::Error;
};

struct WindowTooNarrow : Error {
    using Error::Error;
};

struct SynthesisError : Error {
    using Error::Error;
};

struct AmbiguousTracking : Error {
    using Error::Error;
};

struct ConvergenceError : Error {
    using Error::Error;
};

struct IntertwiningError : Error {
    using Error::Error;
};

struct ScaleSeparationError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

} // namespace adiapass
