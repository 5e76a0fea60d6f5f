#pragma once

#include <stdexcept>
#include <string>

namespace tsgof {

enum class ErrorCode {
    InvalidArgument,
    LagTooLarge,
    DegenerateSeries,
    NumericalError,
    MaxIterExceeded,
    NonFiniteObjective,
    NoConvergence,
    NotCausal,
    NotInvertible,
    NotNoncausal,
    InvalidModel,
    UnsupportedOrder,
    FitDiverged,
    ReplicateFitDiverged,
    DropRateExceeded,
};

/// Single exception type for the library; the code tells callers (and the CLI) what went wrong.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[nodiscard]] inline const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::LagTooLarge: return "LagTooLarge";
        case ErrorCode::DegenerateSeries: return "DegenerateSeries";
        case ErrorCode::NumericalError: return "NumericalError";
        case ErrorCode::MaxIterExceeded: return "MaxIterExceeded";
        case ErrorCode::NonFiniteObjective: return "NonFiniteObjective";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::NotCausal: return "NotCausal";
        case ErrorCode::NotInvertible: return "NotInvertible";
        case ErrorCode::NotNoncausal: return "NotNoncausal";
        case ErrorCode::InvalidModel: return "InvalidModel";
        case ErrorCode::UnsupportedOrder: return "UnsupportedOrder";
        case ErrorCode::FitDiverged: return "FitDiverged";
        case ErrorCode::ReplicateFitDiverged: return "ReplicateFitDiverged";
        case ErrorCode::DropRateExceeded: return "DropRateExceeded";
    }
    return "Unknown";
}

}  // namespace tsgof
