#pragma once

#include <stdexcept>
#include <string>

namespace readlab {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (manifests, lexicons, embedding files, datasets).
class DataError : public Error {
public:
    using Error::Error;
};

/// A corpus or embedding file could not be loaded.
class LoadError : public DataError {
public:
    using DataError::DataError;
};

/// Two inputs that must line up (annotations and tokens, embeddings and documents) do not.
class AlignmentError : public DataError {
public:
    using DataError::DataError;
};

/// Invalid experiment configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Training could not proceed (single-class data, non-finite loss).
class TrainingError : public Error {
public:
    using Error::Error;
};

} // namespace readlab
