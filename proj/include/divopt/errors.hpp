#pragma once

#include <stdexcept>
#include <string>

namespace divopt {

/// Failure categories surfaced by the library; the CLI maps these to exit codes.
enum class Errc {
    DiscountBelowDrift,  // c <= r, value function is infinite
    NonPositiveParam,
    MonotonicityLost,    // W' <= 0 during a march
    ResidualTooLarge,
    GridTooShort,
    NoRoot,
    NoBandCandidate,
    NoConvergence,
    NotAValueFunction,
    DomainError,
    ConfigError,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& msg)
        : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}

    Errc code() const { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& msg) { throw Error(code, msg); }

} // namespace divopt
