#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace textanchor {

/// Base class for all errors thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Input violated a documented precondition.
struct ContractError : Error {
    using Error::Error;
};

/// Byte sequence is not valid UTF-8. Carries the offset of the offending byte.
struct DecodeError : Error {
    std::size_t byte_offset;
    DecodeError(std::size_t offset, const std::string& what)
        : Error("decode error at byte " + std::to_string(offset) + ": " + what),
          byte_offset(offset) {}
};

/// Every word of a transcript normalized to the empty string.
struct EmptyQueryError : Error {
    using Error::Error;
};

/// The query could not be located in the target (empty anchor chain).
struct LocateError : Error {
    using Error::Error;
};

/// A serialized file could not be parsed. Carries the 1-based line number.
struct ParseError : Error {
    std::size_t line;
    ParseError(std::size_t line_no, const std::string& what)
        : Error("line " + std::to_string(line_no) + ": " + what), line(line_no) {}
};

}  // namespace textanchor
