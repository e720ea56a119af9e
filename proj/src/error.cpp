#include "predasym/error.hpp"

namespace predasym {

std::string_view to_string(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::EmptyEmbedding: return "EmptyEmbedding";
    case ErrorKind::TooFewPoints: return "TooFewPoints";
    case ErrorKind::DegenerateDistances: return "DegenerateDistances";
    case ErrorKind::LagOutOfRange: return "LagOutOfRange";
    case ErrorKind::NotStationary: return "NotStationary";
    case ErrorKind::InvalidKind: return "InvalidKind";
    case ErrorKind::SingularCovariance: return "SingularCovariance";
    case ErrorKind::Diverged: return "Diverged";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::RejectionLimit: return "RejectionLimit";
    case ErrorKind::EmptyMatrix: return "EmptyMatrix";
    case ErrorKind::TooShort: return "TooShort";
    case ErrorKind::EmptyRange: return "EmptyRange";
    case ErrorKind::Validation: return "Validation";
    }
    return "Unknown";
}

bool is_validation_error(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::ParseError:
    case ErrorKind::LengthMismatch:
    case ErrorKind::NonFinite:
    case ErrorKind::InvalidKind:
    case ErrorKind::InvalidParams:
    case ErrorKind::TooShort:
    case ErrorKind::LagOutOfRange:
    case ErrorKind::Validation:
        return true;
    default:
        return false;
    }
}

} // namespace predasym
