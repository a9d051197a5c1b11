#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mwv {

enum class ErrorCode {
    NotFound,
    CategoryMismatch,
    EmptyQuery,
    MissingFixture,
    ProviderUnavailable,
    MismatchedClaim,
    DegenerateLabels,
    KTooLarge,
    NoMembers,
    BadConfig,
    DimensionMismatch,
    IncompatibleModel,
    ParseError,
    BadHeader,
    BadLabel,
    DuplicateId,
    EmptyEvaluation,
    MissingFeatures,
    NoVotes,
    NotSupported,
    IoError,
    Usage,
    CountMismatch,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), message_(message) {}

    ErrorCode code() const noexcept { return code_; }
    // The message without the code prefix.
    const std::string& message() const noexcept { return message_; }

private:
    ErrorCode code_;
    std::string message_;
};

// Process exit status for the CLI.
int exit_code_for(ErrorCode code);

}  // namespace mwv
