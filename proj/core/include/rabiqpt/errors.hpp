// errors.hpp — exception hierarchy shared by all rabiqpt modules

#pragma once

#include <stdexcept>
#include <string>

namespace rabiqpt {

// Bad input that violates an operation's documented domain.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Requested integrator step is too coarse for the fastest frequency in H.
class StepSizeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Iterative solver hit its cap, or a truncated space overflowed.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace rabiqpt
