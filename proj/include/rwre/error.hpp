#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rwre {

enum class ErrorCode {
    WeightSumError,
    SupportViolation,
    DuplicateAtom,
    InvalidPiece,
    EmptySample,
    PreconditionViolation,
    TieAtBoundary,
    InsufficientHits,
    NoCrossing,
    AllCorrupted,
    InsufficientAnchors,
    NoDistinguishingSite,
    UnsupportedCase,
    ConfigError,
    IoError,
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::WeightSumError: return "WeightSumError";
    case ErrorCode::SupportViolation: return "SupportViolation";
    case ErrorCode::DuplicateAtom: return "DuplicateAtom";
    case ErrorCode::InvalidPiece: return "InvalidPiece";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::PreconditionViolation: return "PreconditionViolation";
    case ErrorCode::TieAtBoundary: return "TieAtBoundary";
    case ErrorCode::InsufficientHits: return "InsufficientHits";
    case ErrorCode::NoCrossing: return "NoCrossing";
    case ErrorCode::AllCorrupted: return "AllCorrupted";
    case ErrorCode::InsufficientAnchors: return "InsufficientAnchors";
    case ErrorCode::NoDistinguishingSite: return "NoDistinguishingSite";
    case ErrorCode::UnsupportedCase: return "UnsupportedCase";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

#define RWRE_REQUIRE(cond, code, msg)                                                            \
    do {                                                                                         \
        if (!(cond)) throw ::rwre::Error((code), (msg));                                         \
    } while (0)

} // namespace rwre
