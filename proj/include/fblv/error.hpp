#pragma once

#include <stdexcept>
#include <string>

namespace fblv {

/// Base of every error raised by the library. The CLI maps the derived
/// categories onto its exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Inputs that violate a documented precondition (bad parameters, wrong
/// regime, malformed tables or configs).
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// The numerics failed: blow-up, positivity loss, front retreat, Newton
/// divergence.
class NumericError : public Error {
public:
    using Error::Error;
};

/// A well-posed request that has no answer: no threshold exists, the bracket
/// does not bracket, no supersolution witness was found.
class NoResultError : public Error {
public:
    using Error::Error;
};

}  // namespace fblv
