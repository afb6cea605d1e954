/// @file error.hpp
/// @brief Exception hierarchy shared by every core module.

#pragma once

#include <stdexcept>
#include <string>

namespace psim {

/// Broad failure category. The C API and the CLI map these onto stable codes.
enum class ErrorKind {
    Validation,
    OutOfDomain,
    SolverDiverged,
    Io,
    Parse,
    SchemaMismatch,
    Accuracy,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline Error validation_error(const std::string& what) { return {ErrorKind::Validation, what}; }
inline Error domain_error(const std::string& what) { return {ErrorKind::OutOfDomain, what}; }
inline Error io_error(const std::string& what) { return {ErrorKind::Io, what}; }
inline Error parse_error(const std::string& what) { return {ErrorKind::Parse, what}; }

}  // namespace psim
