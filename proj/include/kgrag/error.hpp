#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace kgrag {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An error tied to a row of a tabular input. Rows are numbered as in a
/// spreadsheet: the header is row 1, the first record row 2.
class RowError : public Error {
public:
    RowError(std::size_t row, const std::string& what)
        : Error("row " + std::to_string(row) + ": " + what), row_(row) {}
    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

class CsvError : public RowError {
public:
    using RowError::RowError;
};

class ValidationError : public RowError {
public:
    using RowError::RowError;
};

class ConsistencyError : public RowError {
public:
    ConsistencyError(std::size_t row, long long expected, long long actual)
        : RowError(row, "RPN " + std::to_string(actual) + " does not match S*O*D = " +
                            std::to_string(expected)),
          expected_(expected), actual_(actual) {}
    long long expected() const noexcept { return expected_; }
    long long actual() const noexcept { return actual_; }

private:
    long long expected_;
    long long actual_;
};

/// A deduplicated node received two different values for the same literal.
class ConflictError : public Error {
public:
    using Error::Error;
};

/// A triple violates the relation endpoint rules, or duplicates an existing one.
class SchemaError : public Error {
public:
    using Error::Error;
};

class NotFoundError : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    DimensionMismatch(std::size_t expected, std::size_t actual)
        : Error("embedding dimension mismatch: expected " + std::to_string(expected) + ", got " +
                std::to_string(actual)) {}
};

class CorruptFile : public Error {
public:
    using Error::Error;
};

class VersionMismatch : public Error {
public:
    using Error::Error;
};

/// Query text could not be parsed. Line and column are 1-based.
class QueryError : public Error {
public:
    QueryError(std::size_t line, std::size_t column, const std::string& what)
        : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
          line_(line), column_(column) {}
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

class SyntaxError : public QueryError {
public:
    using QueryError::QueryError;
};

class UnboundVariable : public QueryError {
public:
    using QueryError::QueryError;
};

class MixedAggregate : public QueryError {
public:
    using QueryError::QueryError;
};

/// A query names a label or relation type outside the schema.
class UnknownSchemaName : public Error {
public:
    using Error::Error;
};

class UndefinedSimilarity : public Error {
public:
    using Error::Error;
};

class NoEmbeddings : public Error {
public:
    NoEmbeddings() : Error("no embeddings in graph") {}
};

/// Failure talking to a remote model provider.
class RemoteError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

class ConfigurationError : public Error {
public:
    using Error::Error;
};

class EmptyContexts : public Error {
public:
    EmptyContexts() : Error("no query result and no embeddings to search") {}
};

/// A validation dataset is malformed.
class DatasetError : public Error {
public:
    using Error::Error;
};

/// The service has no ingested store yet.
class NoStore : public Error {
public:
    NoStore() : Error("no FMEA loaded; ingest a table first") {}
};

}  // namespace kgrag
