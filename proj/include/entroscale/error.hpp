#pragma once

#include <stdexcept>
#include <string>

namespace entroscale {

enum class ErrorCode {
    // numeric_core
    NotSquare,
    NotSymmetric,
    IndefiniteAfterJitter,
    DegenerateX,
    LengthMismatch,
    NonFiniteEvaluation,
    // attention / theory
    ShapeMismatch,
    NonFiniteInput,
    InvalidRange,
    InvalidTrainTokens,
    Overflow,
    // diffusion
    StepOutOfRange,
    NonFiniteLoss,
    IncompatibleResolution,
    // harness
    ConfigError,
    IoError,
    CheckpointError,
};

const char* error_code_name(ErrorCode code);

// Single exception type for the whole library; the code is what callers
// (and the CLI exit-code mapping) dispatch on.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace entroscale
