#pragma once

#include <stdexcept>
#include <string>

namespace tdgs {

/// Input or invariant violation. Maps to exit code 1 in the CLI.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Filesystem or stream failure. Maps to exit code 2 in the CLI.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace tdgs
