#pragma once

#include <stdexcept>
#include <string>

namespace tlrsom {

// Malformed input, contract violation or bad configuration. CLI exit code 2.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// A file or directory could not be read or written. CLI exit code 3.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace tlrsom
