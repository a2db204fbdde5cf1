#pragma once

#include <stdexcept>
#include <string>

namespace salso {

// Malformed or inconsistent caller input (bad labels, dimension mismatch, ...).
class InputError : public std::invalid_argument {
public:
    explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// A valid request routed to the wrong entry point, e.g. asking for the Monte
// Carlo expected loss of the Jensen lower-bound criterion.
class UsageError : public std::logic_error {
public:
    explicit UsageError(const std::string& what) : std::logic_error(what) {}
};

} // namespace salso
