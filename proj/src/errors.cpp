#include "divopt/errors.hpp"

namespace divopt {

const char* errc_name(Errc c) {
    switch (c) {
        case Errc::DiscountBelowDrift: return "DiscountBelowDrift";
        case Errc::NonPositiveParam: return "NonPositiveParam";
        case Errc::MonotonicityLost: return "MonotonicityLost";
        case Errc::ResidualTooLarge: return "ResidualTooLarge";
        case Errc::GridTooShort: return "GridTooShort";
        case Errc::NoRoot: return "NoRoot";
        case Errc::NoBandCandidate: return "NoBandCandidate";
        case Errc::NoConvergence: return "NoConvergence";
        case Errc::NotAValueFunction: return "NotAValueFunction";
        case Errc::DomainError: return "DomainError";
        case Errc::ConfigError: return "ConfigError";
    }
    return "UnknownError";
}

} // namespace divopt
