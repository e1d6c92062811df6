#pragma once

#include <stdexcept>
#include <string>

namespace holorepair {

/// Base class for all errors raised by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input file (CSV, constraint file, dictionary).
struct LoadError : Error {
    explicit LoadError(const std::string& msg) : Error(msg) {}
};

/// Constraint / dependency syntax error. Carries the 0-based column offset
/// of the offending character in the source line.
struct ParseError : Error {
    ParseError(const std::string& msg, std::size_t column)
        : Error(msg + " (column " + std::to_string(column) + ")"), column(column) {}
    std::size_t column;
};

/// Violated operation precondition or internal contract.
struct ContractError : Error {
    explicit ContractError(const std::string& msg) : Error(msg) {}
};

}  // namespace holorepair
