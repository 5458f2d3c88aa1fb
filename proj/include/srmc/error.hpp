#pragma once

#include <stdexcept>
#include <string>

namespace srmc {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Vector or matrix sizes do not agree.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A 1-based index fell outside its valid range.
class IndexError : public Error {
public:
    using Error::Error;
};

/// Arguments outside an operation's domain (negative probability, m > n, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Malformed, truncated or inconsistent bitstream.
class FormatError : public Error {
public:
    using Error::Error;
};

/// A numerical invariant failed at run time (e.g. non-real random convolution).
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace srmc
