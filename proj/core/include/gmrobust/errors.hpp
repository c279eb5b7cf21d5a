#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gmrobust {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A generator and a classifier cannot be chained.
class CompositionError : public DimensionError {
public:
    using DimensionError::DimensionError;
};

/// Invalid option, unsupported enumerator or degenerate input.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Class or coordinate index outside the valid range.
class IndexError : public Error {
public:
    using Error::Error;
};

/// A computation produced (or was fed) NaN or infinity.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Malformed model or tensor document. Carries the 1-based line/column of
/// the offending byte when the underlying parser reports one.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column);

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Model document is well-formed but breaks a structural invariant.
/// `invariant()` is a stable identifier such as "weights-length"; `layer()`
/// is the zero-based layer index or npos for whole-document invariants.
class InvariantError : public Error {
public:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    InvariantError(std::string invariant, std::size_t layer, const std::string& detail);

    const std::string& invariant() const noexcept { return invariant_; }
    std::size_t layer() const noexcept { return layer_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    std::string invariant_;
    std::size_t layer_;
    std::string detail_;
};

class VersionError : public Error {
public:
    using Error::Error;
};

/// Exhaustive search would exceed the point budget.
class GridTooLargeError : public Error {
public:
    using Error::Error;
};

} // namespace gmrobust
