#pragma once

#include <stdexcept>
#include <string>

namespace xda {

/// Base class for every error raised by the engine.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input data could not be read or violates the table invariants.
class DataError : public Error {
public:
    using Error::Error;
};

/// A column name or category value does not exist.
class UnknownColumnError : public DataError {
public:
    using DataError::DataError;
};

/// AVG (or similar) evaluated over an empty selection.
class EmptyAggregateError : public Error {
public:
    using Error::Error;
};

/// Graph structure violates an operation's precondition.
class GraphError : public Error {
public:
    using Error::Error;
};

/// A Why-Query that cannot be answered (no signal, empty subspace, bad parameters).
class QueryError : public Error {
public:
    using Error::Error;
};

}  // namespace xda
