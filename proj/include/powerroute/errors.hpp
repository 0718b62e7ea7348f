#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace powerroute {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Internal branch graph of a market does not span all buses.
class DisconnectedGrid : public Error {
public:
    using Error::Error;
};

/// Nodal injections handed to the DC flow do not sum to zero.
class UnbalancedInjection : public Error {
public:
    using Error::Error;
};

/// A tie references a market or boundary bus that does not exist.
class DanglingTie : public Error {
public:
    using Error::Error;
};

/// A network or scenario object breaks one of its structural invariants.
class InvalidModel : public Error {
public:
    using Error::Error;
};

class UnknownNeighbor : public Error {
public:
    using Error::Error;
};

/// Settlement attempted against an agent whose base dispatch moved since pricing.
class StaleState : public Error {
public:
    using Error::Error;
};

/// Relaxation did not reach a fixed point within the sweep budget.
class NonConvergence : public Error {
public:
    using Error::Error;
};

/// Itemized payments disagree with the routed cost. Indicates a defect.
class InternalMismatch : public Error {
public:
    using Error::Error;
};

/// Dispatch problem is too large for the exhaustive active-set search.
class SolverLimit : public Error {
public:
    using Error::Error;
};

/// Error tied to a 1-based line of a scenario file.
class LineError : public Error {
public:
    LineError(std::size_t line, const std::string& message)
        : Error("line " + std::to_string(line) + ": " + message), line_(line), message_(message) {}

    std::size_t line() const noexcept { return line_; }
    const std::string& message() const noexcept { return message_; }

private:
    std::size_t line_;
    std::string message_;
};

/// Malformed record in a scenario file.
class ParseError : public LineError {
public:
    using LineError::LineError;
};

/// Well-formed records that do not describe a consistent scenario.
class ValidationError : public LineError {
public:
    using LineError::LineError;
};

}  // namespace powerroute
