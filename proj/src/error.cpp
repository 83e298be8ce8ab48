#include "tandem/error.hpp"

namespace tandem {

std::string_view error_code_name(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::kInvalidArgument: return "InvalidArgument";
        case ErrorCode::kNonFinite: return "NonFinite";
        case ErrorCode::kDegenerateRegion: return "DegenerateRegion";
        case ErrorCode::kSameState: return "SameState";
        case ErrorCode::kUnsupportedFamily: return "UnsupportedFamily";
        case ErrorCode::kAlphabetTooLarge: return "AlphabetTooLarge";
        case ErrorCode::kZeroLikelihood: return "ZeroLikelihood";
        case ErrorCode::kHorizonExceeded: return "HorizonExceeded";
        case ErrorCode::kNonIntegerCounts: return "NonIntegerCounts";
        case ErrorCode::kZeroInformation: return "ZeroInformation";
        case ErrorCode::kMissingConstant: return "MissingConstant";
        case ErrorCode::kParseError: return "ParseError";
        case ErrorCode::kValidationError: return "ValidationError";
    }
    return "Unknown";
}

}  // namespace tandem
