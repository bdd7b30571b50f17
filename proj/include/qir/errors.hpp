#pragma once

#include <stdexcept>
#include <string>

namespace qir {

// Invalid argument to a library operation (lengths, ranges, flag combos).
class ParameterError : public std::invalid_argument {
public:
    explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

// Internal consistency violation; indicates a bug, not a caller error.
class InternalError : public std::logic_error {
public:
    explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace qir
