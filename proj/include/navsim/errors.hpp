#pragma once

#include <stdexcept>
#include <string>

namespace navsim {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raycast origin lies inside an obstacle.
struct InvalidOriginError : Error {
    using Error::Error;
};

// No collision-free path between the two query points.
struct UnreachableError : Error {
    using Error::Error;
};

// Malformed input file (JSON syntax, missing fields, bad values).
struct ParseError : Error {
    using Error::Error;
};

// Structurally valid input that violates a documented invariant.
struct ValidationError : Error {
    using Error::Error;
};

// HTTP-level failure talking to a model server: timeout, non-2xx,
// or a response body that is not chat-completions shaped.
struct TransportError : Error {
    using Error::Error;
};

} // namespace navsim
