#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace emden {

enum class ErrorCode {
    DimensionTooSmall,
    ExponentOutOfRange,
    RadiusOutOfRange,
    NegativeBoundaryValue,
    VariantMismatch,
    TooFewNodes,
    InvalidGrid,
    NonFiniteValue,
    GridMismatch,
    NegativeInput,
    NoConvergence,
    SingularJacobian,
    SolveFailed,
    EmptySweep,
    MixedVariants,
    CapExceeded,
    InvalidConfig,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-readable code; what() holds the diagnostic.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace emden
