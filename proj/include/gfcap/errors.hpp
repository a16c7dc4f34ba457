#pragma once

#include <stdexcept>
#include <string>

namespace gfcap {

enum class ErrorKind {
    InvalidParams,
    NonTransverseSlice,
    DegenerateCrossing,
    MissingCriticalPoint,
    NonGenericFamily,
    InvalidPath,
    UndersampledPath,
    UnsupportedDimension,
    BadEta,
    RuleNotApplicable,
    InsufficientSweep,
    InvalidBox,
    Config,
};

inline const char* kind_name(ErrorKind k) {
    switch (k) {
    case ErrorKind::InvalidParams: return "invalid-params";
    case ErrorKind::NonTransverseSlice: return "non-transverse-slice";
    case ErrorKind::DegenerateCrossing: return "degenerate-crossing";
    case ErrorKind::MissingCriticalPoint: return "missing-critical-point";
    case ErrorKind::NonGenericFamily: return "non-generic-family";
    case ErrorKind::InvalidPath: return "invalid-path";
    case ErrorKind::UndersampledPath: return "undersampled-path";
    case ErrorKind::UnsupportedDimension: return "unsupported-dimension";
    case ErrorKind::BadEta: return "bad-eta";
    case ErrorKind::RuleNotApplicable: return "rule-not-applicable";
    case ErrorKind::InsufficientSweep: return "insufficient-sweep";
    case ErrorKind::InvalidBox: return "invalid-box";
    case ErrorKind::Config: return "config";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(kind_name(kind)) + ": " + what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

    // config-type problems map to exit code 2, the rest are numerical (3)
    bool is_config() const {
        return kind_ == ErrorKind::InvalidParams || kind_ == ErrorKind::Config ||
               kind_ == ErrorKind::UnsupportedDimension || kind_ == ErrorKind::InvalidBox;
    }

private:
    ErrorKind kind_;
};

} // namespace gfcap
