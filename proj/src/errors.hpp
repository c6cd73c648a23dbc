#pragma once

#include <stdexcept>
#include <string>

namespace jdlab {

// Error taxonomy mirrors the process exit codes: validation failures are
// caller mistakes, numeric failures are solver/simulation breakdowns,
// io failures are filesystem problems.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace jdlab
