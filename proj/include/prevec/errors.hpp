#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace prevec {

enum class ErrorKind {
    DomainExit,
    RangeOverflow,
    InverseDiverged,
    SingularJacobian,
    AllZero,
    TooFewPoints,
    Diverging,
    SyntaxError,
    UnknownIdentifier,
    ArityMismatch,
    DomainError,
    NotIndependent,
    NotCommuting,
    ConfigError,
    IoError,
};

const char* to_string(ErrorKind kind);

/// Base of every error raised by the library. The kind is stable and is what
/// the CLI maps onto exit codes.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// A point (or an iterate of a flow) left the box it must stay in.
class DomainExit : public Error {
public:
    explicit DomainExit(const std::string& what, std::optional<std::int64_t> iteration = std::nullopt)
        : Error(ErrorKind::DomainExit, what), iteration_(iteration) {}

    [[nodiscard]] std::optional<std::int64_t> iteration() const noexcept { return iteration_; }

private:
    std::optional<std::int64_t> iteration_;
};

class RangeOverflow : public Error {
public:
    explicit RangeOverflow(const std::string& what) : Error(ErrorKind::RangeOverflow, what) {}
};

class InverseDiverged : public Error {
public:
    explicit InverseDiverged(const std::string& what) : Error(ErrorKind::InverseDiverged, what) {}
};

class SingularJacobian : public Error {
public:
    explicit SingularJacobian(const std::string& what) : Error(ErrorKind::SingularJacobian, what) {}
};

class AllZero : public Error {
public:
    explicit AllZero(const std::string& what) : Error(ErrorKind::AllZero, what) {}
};

class TooFewPoints : public Error {
public:
    explicit TooFewPoints(const std::string& what) : Error(ErrorKind::TooFewPoints, what) {}
};

class Diverging : public Error {
public:
    explicit Diverging(const std::string& what) : Error(ErrorKind::Diverging, what) {}
};

/// Parse failure with the byte offset into the source and the set of tokens
/// that would have been accepted there.
class SyntaxError : public Error {
public:
    SyntaxError(std::size_t offset, std::vector<std::string> expected, const std::string& found);

    [[nodiscard]] std::size_t offset() const noexcept { return offset_; }
    [[nodiscard]] const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
    std::size_t offset_;
    std::vector<std::string> expected_;
};

class UnknownIdentifier : public Error {
public:
    UnknownIdentifier(std::size_t offset, const std::string& name);

    [[nodiscard]] std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

class ArityMismatch : public Error {
public:
    explicit ArityMismatch(const std::string& what) : Error(ErrorKind::ArityMismatch, what) {}
};

/// Evaluation failure (log of a non-positive number, division by zero, ...).
/// `subexpression()` is the printed form of the node that failed.
class DomainError : public Error {
public:
    DomainError(const std::string& what, std::string subexpression)
        : Error(ErrorKind::DomainError, what), subexpression_(std::move(subexpression)) {}

    [[nodiscard]] const std::string& subexpression() const noexcept { return subexpression_; }

private:
    std::string subexpression_;
};

class NotIndependent : public Error {
public:
    explicit NotIndependent(const std::string& what) : Error(ErrorKind::NotIndependent, what) {}
};

class NotCommuting : public Error {
public:
    explicit NotCommuting(const std::string& what) : Error(ErrorKind::NotCommuting, what) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ErrorKind::ConfigError, what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorKind::IoError, what) {}
};

}  // namespace prevec
