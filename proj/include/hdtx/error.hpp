#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace hdtx {

// Base of everything thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// N-Triples syntax error. Column is 1-based; line is 0 until the stream
// layer attaches it.
class ParseError : public Error {
public:
    ParseError(std::string reason, std::size_t column, std::uint64_t line = 0)
        : Error(format(reason, column, line)),
          reason_(std::move(reason)),
          column_(column),
          line_(line) {}

    const std::string& reason() const noexcept { return reason_; }
    std::size_t column() const noexcept { return column_; }
    std::uint64_t line() const noexcept { return line_; }

    ParseError at_line(std::uint64_t line) const { return {reason_, column_, line}; }

private:
    static std::string format(const std::string& reason, std::size_t column, std::uint64_t line) {
        std::string out;
        if (line != 0) out += "line " + std::to_string(line) + ", ";
        out += "column " + std::to_string(column) + ": " + reason;
        return out;
    }

    std::string reason_;
    std::size_t column_;
    std::uint64_t line_;
};

class NotSortedError : public Error {
public:
    using Error::Error;
};

class DuplicateTripleError : public Error {
public:
    using Error::Error;
};

class SubjectGapError : public Error {
public:
    using Error::Error;
};

class IdOutOfRangeError : public Error {
public:
    using Error::Error;
};

class CapacityExceededError : public Error {
public:
    using Error::Error;
};

class MappingIncompleteError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

// What a container file violated.
enum class FormatDefect {
    BadMagic,
    VersionUnsupported,
    ChecksumMismatch,
    Truncated,
    Structure,
};

class FormatError : public Error {
public:
    FormatError(FormatDefect defect, const std::string& msg) : Error(msg), defect_(defect) {}
    FormatDefect defect() const noexcept { return defect_; }

private:
    FormatDefect defect_;
};

}  // namespace hdtx
