#pragma once

#include <stdexcept>
#include <string>

namespace evcoord {

/// Bad input data: malformed configs, dimension mismatches, protocol misuse.
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Problem exceeds a configured capacity (e.g. enumeration horizon cap).
struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Simulation cannot continue (e.g. a truck has no feasible charging plan,
/// which indicates a scenario-generation bug).
struct EngineError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace evcoord
