#pragma once

#include <stdexcept>
#include <string>

namespace loco {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Shape or size mismatch between operands.
class DimensionError : public Error {
public:
    explicit DimensionError(const std::string& msg) : Error(msg) {}
};

// Invalid user-supplied configuration (K > p, bad ratio, ...).
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Numerical factorization failure (non-PD pivot, ...).
class DecompositionError : public Error {
public:
    explicit DecompositionError(const std::string& msg) : Error(msg) {}
};

// Input fails a structural precondition (asymmetry, non-finite entries, ...).
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& msg) : Error(msg) {}
};

// Singular system where a unique solution was requested.
class RankError : public Error {
public:
    explicit RankError(const std::string& msg) : Error(msg) {}
};

// Feature is (numerically) a linear combination of the others.
class CollinearityError : public Error {
public:
    explicit CollinearityError(const std::string& msg) : Error(msg) {}
};

// Degenerate input column or response (zero norm, zero variance).
class DegenerateError : public Error {
public:
    explicit DegenerateError(const std::string& msg) : Error(msg) {}
};

// File I/O failure; message carries the path.
class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

}  // namespace loco
