#pragma once

#include <stdexcept>
#include <string>

namespace qc {

enum class ErrorCode {
    InvalidGrid,
    NonFinite,
    NotClosed,
    DirectQuadratureTooLarge,
    ZeroInput,
    InvalidMu,
    InvalidEta,
    NoConvergence,
    NonPositiveJacobian,
    DegenerateNormalization,
    DegenerateDerivative,
    CoincidentPoints,
    PointOutsideGrid,
    PreconditionResidualTooLarge,
    BallOutsideGrid,
    DomainError,
    Io,
    Usage
};

const char* to_string(ErrorCode c);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace qc
