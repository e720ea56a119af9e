#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace predasym {

enum class ErrorKind {
    ParseError,
    LengthMismatch,
    NonFinite,
    EmptyEmbedding,
    TooFewPoints,
    DegenerateDistances,
    LagOutOfRange,
    NotStationary,
    InvalidKind,
    SingularCovariance,
    Diverged,
    InvalidParams,
    RejectionLimit,
    EmptyMatrix,
    TooShort,
    EmptyRange,
    Validation,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; `kind()` tells callers which
/// contract was violated.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind)
    {
    }

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// True for error kinds caused by bad user input rather than numerics.
bool is_validation_error(ErrorKind kind) noexcept;

} // namespace predasym
