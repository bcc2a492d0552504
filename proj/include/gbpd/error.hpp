#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gbpd {

enum class ErrorCode {
    DimensionMismatch,
    UnsupportedDimension,
    NotSymmetric,
    NotPositiveDefinite,
    NonpositiveRadius,
    InvalidIndexSet,
    NotOrthogonal,
    SingularMatrix,
    InvalidArgument,
    NegativeWeight,
    NonpositiveT,
    InvalidFlat,
    InfeasibleTarget,
    Parse,
    Io,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; the code lets callers (the CLI in
// particular) map failures onto exit statuses without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

    // Configuration/input problems as opposed to numeric/domain failures.
    bool is_input_error() const noexcept {
        return code_ == ErrorCode::Parse || code_ == ErrorCode::Io;
    }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

}  // namespace gbpd
