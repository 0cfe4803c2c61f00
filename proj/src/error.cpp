#include "mfts/error.hpp"

namespace mfts {

const char* error_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonFinite: return "NonFinite";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::NonSymmetric: return "NonSymmetric";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::RankDeficient: return "RankDeficient";
        case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
        case ErrorCode::TooShort: return "TooShort";
        case ErrorCode::EmptySeries: return "EmptySeries";
        case ErrorCode::KOutOfRange: return "KOutOfRange";
        case ErrorCode::AllZero: return "AllZero";
        case ErrorCode::DegenerateEigenvalue: return "DegenerateEigenvalue";
        case ErrorCode::DegenerateStack: return "DegenerateStack";
        case ErrorCode::SingularV: return "SingularV";
        case ErrorCode::Empty: return "Empty";
        case ErrorCode::UnstableECM: return "UnstableECM";
        case ErrorCode::DimensionGuard: return "DimensionGuard";
        case ErrorCode::MissingCell: return "MissingCell";
        case ErrorCode::DuplicateCell: return "DuplicateCell";
        case ErrorCode::NonPositiveForLog: return "NonPositiveForLog";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::TooManyFailures: return "TooManyFailures";
    }
    return "UnknownError";
}

int error_exit_code(ErrorCode code) {
    switch (code) {
        case ErrorCode::MissingCell:
        case ErrorCode::DuplicateCell:
        case ErrorCode::NonPositiveForLog:
        case ErrorCode::ParseError:
        case ErrorCode::IoError:
            return 1;
        default:
            return 2;
    }
}

} // namespace mfts
