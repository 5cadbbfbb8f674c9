#pragma once

#include <stdexcept>
#include <string>

namespace dbf {

enum class Errc {
    // input / validation
    MissingFile,
    MalformedRow,
    GapInYears,
    UnmappedCause,
    NegativeValue,
    ConstantColumn,
    TooFewRows,
    TooFewColumns,
    NonPositiveIndex,
    LengthMismatch,
    TooFewPoints,
    DimensionMismatch,
    ZeroVector,
    ParseError,
    ExponentNotInteger,
    UnknownIndex,
    TooFewForecastRows,
    InvalidConfig,
    // numerical
    NoConvergence,
    EmptyFront,
    DomainError,
    // i/o
    IoError,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    Errc code() const { return code_; }

private:
    Errc code_;
};

// Exit-code classes for the CLI: 1 validation, 2 numerical, 3 i/o.
int exit_class(Errc code);

} // namespace dbf
