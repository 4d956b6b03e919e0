#pragma once

#include <stdexcept>
#include <string>

namespace comblab {

/// Adaptive step control could not reach the requested time within budget.
class IntegrationFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An internal consistency check of a computed quantity failed.
class AssertionFailure : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class IoFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

} // namespace comblab
