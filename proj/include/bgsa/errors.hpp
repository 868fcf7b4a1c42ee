#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bgsa {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Distribution parameters outside their support.
class DomainError : public Error {
public:
    using Error::Error;
};

// Malformed or inconsistent user input (files, flags, configs).
class InputError : public Error {
public:
    using Error::Error;
};

// Sampler state that violates a model invariant.
class StateError : public Error {
public:
    using Error::Error;
};

// Slice sampler could not locate any point above the slice level.
class DegenerateDensityError : public Error {
public:
    using Error::Error;
};

class ChainError : public Error {
public:
    ChainError(std::size_t iteration, const std::string& what)
        : Error("iteration " + std::to_string(iteration) + ": " + what), iteration_(iteration) {}

    std::size_t iteration() const noexcept { return iteration_; }

private:
    std::size_t iteration_;
};

}  // namespace bgsa
