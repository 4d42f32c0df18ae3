#pragma once

#include <stdexcept>
#include <string>

namespace garding {

// Bad user input: malformed config, out-of-range parameters.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A quadrature or truncation is too coarse for the requested band.
struct AliasingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Point outside the injectivity ball or an unsupported dual index.
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A checked mathematical property did not hold.
struct VerificationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace garding
