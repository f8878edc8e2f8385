#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hspace {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operands live in metric spaces of different dimension.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A point with zero coordinates or a non-finite coordinate.
class InvalidPointError : public Error {
public:
    using Error::Error;
};

/// A point set with no members; the hyperspace has no empty element.
class EmptySetError : public Error {
public:
    using Error::Error;
};

/// A 1-based sequence index outside the stored prefix.
class IndexError : public Error {
public:
    using Error::Error;
};

// ---- file / format errors ----

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("parse error at line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class RaggedRowError : public Error {
public:
    RaggedRowError(std::size_t line, std::size_t got, std::size_t want)
        : Error("ragged row at line " + std::to_string(line) + ": " + std::to_string(got) +
                " columns, expected " + std::to_string(want)),
          line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class EmptyCloudError : public Error {
public:
    using Error::Error;
};

/// Malformed manifest or system definition file.
class FormatError : public Error {
public:
    using Error::Error;
};

// ---- analysis errors ----

/// No candidate qualified for the limit set at the requested tolerance.
class EmptyLimitError : public Error {
public:
    using Error::Error;
};

/// The uniform-closeness hypothesis fails at a concrete sequence index.
class HypothesisViolatedError : public Error {
public:
    HypothesisViolatedError(std::size_t index, double dist, double epsilon)
        : Error("hypothesis violated at index " + std::to_string(index) + ": distance " +
                std::to_string(dist) + " >= epsilon " + std::to_string(epsilon)),
          index_(index) {}
    std::size_t index() const { return index_; }

private:
    std::size_t index_;
};

/// Attractor iteration requested on a system whose Lipschitz constant is >= 1.
class NotContractiveError : public Error {
public:
    explicit NotContractiveError(double factor)
        : Error("system is not contractive: Lipschitz constant " + std::to_string(factor)),
          factor_(factor) {}
    double factor() const { return factor_; }

private:
    double factor_;
};

/// The stored prefix is too short to extract the next witness-chain index.
class PrefixExhaustedError : public Error {
public:
    explicit PrefixExhaustedError(std::size_t level)
        : Error("prefix exhausted at chain level " + std::to_string(level) +
                ": no admissible subsequence index remains"),
          level_(level) {}
    std::size_t level() const { return level_; }

private:
    std::size_t level_;
};

}  // namespace hspace
