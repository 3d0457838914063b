#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cbl {

/// Base class for all domain errors raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed CSV input (bad column count, unparsable number or date).
class ParseError : public Error {
public:
    ParseError(std::size_t row, const std::string& what)
        : Error("row " + std::to_string(row) + ": " + what), row_(row) {}
    explicit ParseError(const std::string& what) : Error(what), row_(0) {}
    std::size_t row() const { return row_; }

private:
    std::size_t row_;
};

/// Two rows describe the same (customer, date).
class DuplicateRowError : public ParseError {
public:
    using ParseError::ParseError;
};

/// Slot layout incompatible with the requested operation.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Referenced customer or date is not part of the dataset.
class MembershipError : public Error {
public:
    using Error::Error;
};

/// Invalid argument value (empty set, out-of-range ratio, ...).
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Not enough qualifying days before the event day.
class InsufficientHistoryError : public Error {
public:
    using Error::Error;
};

/// Required (subject, day, slot) cells are not covered by the input.
class CoverageError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Readings violate data preconditions (negative or non-finite values).
class DataError : public Error {
public:
    using Error::Error;
};

/// Report files could not be written.
class EmissionError : public Error {
public:
    using Error::Error;
};

/// An experiment cell failed; message carries the cell coordinate.
class CellError : public Error {
public:
    using Error::Error;
};

} // namespace cbl
