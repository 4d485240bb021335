#pragma once

#include <stdexcept>
#include <string>

namespace nmv {

// Bad user input: malformed config, off-grid times, incompatible geometry.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// A numeric procedure failed to meet its contract (e.g. fixed point did not
// converge within the iteration cap).
struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace nmv
