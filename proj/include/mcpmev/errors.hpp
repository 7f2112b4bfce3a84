#pragma once

#include <stdexcept>
#include <string>

namespace mcpmev {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid argument values (negative rates, out-of-range probabilities, ...).
struct DomainError : Error {
    using Error::Error;
};

// Probability outside [0,1] or inconsistent probability bundle.
struct ProbabilityError : DomainError {
    using DomainError::DomainError;
};

// --- numeric kernel ---
struct NoBracket : Error {
    using Error::Error;
};
struct NoConvergence : Error {
    using Error::Error;
};

// --- delay economics ---
struct UnsupportedRegime : Error {
    using Error::Error;
};
struct OutOfRegime : Error {
    using Error::Error;
};

// --- games ---
struct NoRoot : Error {
    using Error::Error;
};

// --- auctions ---
struct NotRegular : Error {
    using Error::Error;
};

// --- latency math ---
struct DegenerateRates : Error {
    using Error::Error;
};

// --- spam / multi-submission ---
struct InsufficientDeltas : Error {
    using Error::Error;
};
struct TooManyProposers : Error {
    using Error::Error;
};
struct NotDiminishing : Error {
    using Error::Error;
};

// --- scheduler ---
struct DuplicateId : Error {
    using Error::Error;
};
struct UnknownProposer : Error {
    using Error::Error;
};
struct MixedTimestampPresence : Error {
    using Error::Error;
};
struct InconsistentDuplicateTips : Error {
    using Error::Error;
};
struct InconsistentDuplicateDeps : Error {
    using Error::Error;
};

// --- simulator / CLI ---
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace mcpmev
