#pragma once

#include <stdexcept>
#include <string>

namespace robba {

enum class ErrorKind {
    NotPrime,
    NotEisenstein,
    FieldMismatch,
    DivisionByIndistinguishableZero,
    PrecisionExhausted,
    HenselCriterionFails,
    EmptyWindow,
    OutsideWindow,
    NonConvergentComposition,
    AllCoefficientsIndistinguishable,
    WidegUndetermined,
    NotIntegral,
    ConstantTermNotZero,
    HeightOne,
    ModulusExhausted,
    LiftStalled,
    NoStabilization,
    SPrimeZeroIndistinguishable,
    DiscriminantIndistinguishableFromZero,
    TailNotCertified,
    PreconditionViolated,
    ParseError,
    InvalidArgument,
};

const char* error_kind_name(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind k, const std::string& msg) { throw Error(k, msg); }

}  // namespace robba
