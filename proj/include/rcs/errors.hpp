#pragma once

#include <stdexcept>
#include <string>

namespace rcs {

// Error categories map 1:1 onto CLI exit codes.
struct Error : std::runtime_error {
    Error(std::string msg, int code) : std::runtime_error(std::move(msg)), exit_code(code) {}
    int exit_code;
};

struct ConfigError : Error {
    explicit ConfigError(std::string msg) : Error(std::move(msg), 2) {}
};

struct NumericFault : Error {
    NumericFault(std::string msg, int step) : Error(std::move(msg), 3), step_index(step) {}
    int step_index;
};

struct CapacityError : Error {
    explicit CapacityError(std::string msg) : Error(std::move(msg), 4) {}
};

}  // namespace rcs
