// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 SETU Contributors

#pragma once

#include <stdexcept>
#include <string>

namespace setu {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input record or document.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Well-formed input violating a corpus invariant (duplicate ids, missing files).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Resource file with inconsistent layout (embedding dims, non-numeric values).
class FormatError : public Error {
public:
    using Error::Error;
};

class DecodeError : public Error {
public:
    using Error::Error;
};

/// Invalid combination of options (masks, combiners, generator specs).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Feature store produced by an incompatible descriptor or model version.
class VersionError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace setu
