#ifndef MFTS_ERROR_HPP
#define MFTS_ERROR_HPP

#include <stdexcept>
#include <string>

namespace mfts {

// Structured error names. Every failure the library can signal carries one of
// these codes; the CLI maps them to exit codes via error_exit_code().
enum class ErrorCode {
    // construction / shape
    NonFinite,
    ShapeMismatch,
    // eigensolver / decompositions
    NonSymmetric,
    NoConvergence,
    RankDeficient,
    NotPositiveDefinite,
    // series / selection
    TooShort,
    EmptySeries,
    KOutOfRange,
    AllZero,
    DegenerateEigenvalue,
    DegenerateStack,
    SingularV,
    Empty,
    // dgp
    UnstableECM,
    // baseline
    DimensionGuard,
    // panel / config I/O
    MissingCell,
    DuplicateCell,
    NonPositiveForLog,
    ParseError,
    IoError,
    // monte carlo
    TooManyFailures,
};

const char* error_name(ErrorCode code);

// 1 = I/O or parse failure, 2 = numerical / degenerate-input failure.
int error_exit_code(ErrorCode code);

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_name(code)) + ": " + message), code_(code) {}

    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

} // namespace mfts

#endif
