#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fdmatch {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An arrival violates the declared graph model (cycle, disconnected growth...).
struct ModelViolation : Error { using Error::Error; };
struct InvalidParameter : Error { using Error::Error; };
struct StateError : Error { using Error::Error; };
struct IllegalIncrease : Error { using Error::Error; };
struct PolytopeViolation : Error { using Error::Error; };
/// An algorithm step was invoked for an event it does not handle.
struct WrongDispatch : Error { using Error::Error; };
/// An internal invariant failed; signals a bug rather than bad input.
struct InvariantBroken : Error { using Error::Error; };
struct UsageError : Error { using Error::Error; };
struct LemmaConditionError : Error { using Error::Error; };
struct SizeLimit : Error { using Error::Error; };

struct ParseError : Error {
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line(line) {}
    std::size_t line;
};

} // namespace fdmatch
