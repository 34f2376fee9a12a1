#include "prevec/errors.hpp"

#include <sstream>

namespace prevec {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::DomainExit: return "DomainExit";
        case ErrorKind::RangeOverflow: return "RangeOverflow";
        case ErrorKind::InverseDiverged: return "InverseDiverged";
        case ErrorKind::SingularJacobian: return "SingularJacobian";
        case ErrorKind::AllZero: return "AllZero";
        case ErrorKind::TooFewPoints: return "TooFewPoints";
        case ErrorKind::Diverging: return "Diverging";
        case ErrorKind::SyntaxError: return "SyntaxError";
        case ErrorKind::UnknownIdentifier: return "UnknownIdentifier";
        case ErrorKind::ArityMismatch: return "ArityMismatch";
        case ErrorKind::DomainError: return "DomainError";
        case ErrorKind::NotIndependent: return "NotIndependent";
        case ErrorKind::NotCommuting: return "NotCommuting";
        case ErrorKind::ConfigError: return "ConfigError";
        case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

namespace {

std::string syntax_message(std::size_t offset, const std::vector<std::string>& expected,
                           const std::string& found) {
    std::ostringstream os;
    os << "syntax error at offset " << offset << ": expected ";
    if (expected.size() > 1) {
        os << "one of ";
    }
    for (std::size_t i = 0; i < expected.size(); ++i) {
        if (i > 0) {
            os << ", ";
        }
        os << expected[i];
    }
    os << ", found " << found;
    return os.str();
}

}  // namespace

SyntaxError::SyntaxError(std::size_t offset, std::vector<std::string> expected, const std::string& found)
    : Error(ErrorKind::SyntaxError, syntax_message(offset, expected, found)),
      offset_(offset),
      expected_(std::move(expected)) {}

UnknownIdentifier::UnknownIdentifier(std::size_t offset, const std::string& name)
    : Error(ErrorKind::UnknownIdentifier,
            "unknown identifier '" + name + "' at offset " + std::to_string(offset)),
      offset_(offset) {}

}  // namespace prevec
