#pragma once

#include <stdexcept>
#include <string>

namespace oamao {

/// Base class for every error raised by the library. The CLI maps these to
/// exit code 1; usage errors are handled separately.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration (grid, beam, missing metadata).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Two objects that must share a grid or shape do not.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Input that makes the operation meaningless (zero field, constant image).
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

/// A caller broke an API contract (stale tape, bad precondition).
class ContractError : public Error {
public:
    using Error::Error;
};

/// Training produced non-finite values.
class DivergenceError : public Error {
public:
    using Error::Error;
};

/// Malformed file; carries the byte offset where parsing stopped.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : Error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Stored content does not match its recorded hash.
class CorruptionError : public Error {
public:
    using Error::Error;
};

/// File system failure.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace oamao
