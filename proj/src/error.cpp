#include "mwv/error.hpp"

namespace mwv {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::NotFound: return "NotFound";
        case ErrorCode::CategoryMismatch: return "CategoryMismatch";
        case ErrorCode::EmptyQuery: return "EmptyQuery";
        case ErrorCode::MissingFixture: return "MissingFixture";
        case ErrorCode::ProviderUnavailable: return "ProviderUnavailable";
        case ErrorCode::MismatchedClaim: return "MismatchedClaim";
        case ErrorCode::DegenerateLabels: return "DegenerateLabels";
        case ErrorCode::KTooLarge: return "KTooLarge";
        case ErrorCode::NoMembers: return "NoMembers";
        case ErrorCode::BadConfig: return "BadConfig";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::IncompatibleModel: return "IncompatibleModel";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::BadHeader: return "BadHeader";
        case ErrorCode::BadLabel: return "BadLabel";
        case ErrorCode::DuplicateId: return "DuplicateId";
        case ErrorCode::EmptyEvaluation: return "EmptyEvaluation";
        case ErrorCode::MissingFeatures: return "MissingFeatures";
        case ErrorCode::NoVotes: return "NoVotes";
        case ErrorCode::NotSupported: return "NotSupported";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::Usage: return "Usage";
        case ErrorCode::CountMismatch: return "CountMismatch";
    }
    return "Unknown";
}

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::Usage:
        case ErrorCode::BadConfig:
        case ErrorCode::EmptyQuery:
            return 1;
        case ErrorCode::IoError:
        case ErrorCode::ParseError:
        case ErrorCode::BadHeader:
        case ErrorCode::BadLabel:
        case ErrorCode::DuplicateId:
        case ErrorCode::ProviderUnavailable:
            return 2;
        case ErrorCode::MissingFixture:
            return 3;
        case ErrorCode::IncompatibleModel:
        case ErrorCode::DimensionMismatch:
            return 4;
        case ErrorCode::DegenerateLabels:
        case ErrorCode::KTooLarge:
        case ErrorCode::EmptyEvaluation:
        case ErrorCode::MissingFeatures:
        case ErrorCode::CountMismatch:
        case ErrorCode::NoVotes:
            return 5;
        default:
            return 2;
    }
}

}  // namespace mwv
