#pragma once

#include <stdexcept>
#include <string>

namespace fgda {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ShapeError : public Error {
public:
    using Error::Error;
};

/// Out-of-domain hyperparameter or malformed numeric input.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Non-finite value encountered during optimization.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Every encoding on one side of a batch was masked out.
class DegenerateBatchError : public Error {
public:
    DegenerateBatchError(const std::string& side)
        : Error("degenerate batch: no valid " + side + " samples"), side_(side) {}

    const std::string& side() const noexcept { return side_; }

private:
    std::string side_;
};

/// Coincident class centers make the center distance undefined.
class DegenerateGeometryError : public Error {
public:
    DegenerateGeometryError(int class_a, int class_b)
        : Error("coincident centers for classes " + std::to_string(class_a) + " and " +
                std::to_string(class_b)),
          a_(class_a), b_(class_b) {}

    int first() const noexcept { return a_; }
    int second() const noexcept { return b_; }

private:
    int a_;
    int b_;
};

class DataError : public Error {
public:
    using Error::Error;
};

/// CSV / JSON parse failure. Line is 1-based; 0 when not applicable.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Configuration rejected before any compute.
class ValidationError : public Error {
public:
    using Error::Error;
};

} // namespace fgda
