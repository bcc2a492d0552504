#include "gbpd/error.hpp"

namespace gbpd {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::UnsupportedDimension: return "UnsupportedDimension";
        case ErrorCode::NotSymmetric: return "NotSymmetric";
        case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
        case ErrorCode::NonpositiveRadius: return "NonpositiveRadius";
        case ErrorCode::InvalidIndexSet: return "InvalidIndexSet";
        case ErrorCode::NotOrthogonal: return "NotOrthogonal";
        case ErrorCode::SingularMatrix: return "SingularMatrix";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::NegativeWeight: return "NegativeWeight";
        case ErrorCode::NonpositiveT: return "NonpositiveT";
        case ErrorCode::InvalidFlat: return "InvalidFlat";
        case ErrorCode::InfeasibleTarget: return "InfeasibleTarget";
        case ErrorCode::Parse: return "Parse";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

}  // namespace gbpd
