#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace npuf {

// Bad parameter values or inconsistent settings.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Data that does not fit the contract of the receiving operation.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Ill-conditioned or unstable numerics.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DivergenceError : public NumericalError {
public:
    DivergenceError(const std::string& what, std::size_t index)
        : NumericalError(what + " (index " + std::to_string(index) + ")"), index_(index) {}
    std::size_t index() const { return index_; }

private:
    std::size_t index_;
};

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace npuf
