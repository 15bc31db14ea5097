#pragma once

#include <stdexcept>

namespace kicktop {

// Malformed or inconsistent configuration. CLI exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Request exceeds a documented size cap. CLI exit code 3.
struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A numerical self-check failed (unitarity, symmetry, ...). CLI exit code 4.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

} // namespace kicktop
