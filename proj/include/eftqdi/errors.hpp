// Exception taxonomy for the eftqdi library. Every throwing operation names
// one of these types so callers can react to the specific failure class.

#pragma once

#include <stdexcept>
#include <string>

namespace eftqdi {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Transition matrix has no unique stationary distribution (or is periodic).
struct NonErgodicChain : Error {
    using Error::Error;
};

// A digraph whose in-weight and out-weight sums differ at some node.
struct NotBalanced : Error {
    using Error::Error;
};

// A regressor left its configured norm envelope.
struct BoundViolation : Error {
    using Error::Error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

// density_bounds called with a non-positive radius.
struct DegenerateInterval : Error {
    using Error::Error;
};

// Step-size exponent outside (1/2, 1].
struct InvalidExponent : Error {
    using Error::Error;
};

struct NonPositiveInput : Error {
    using Error::Error;
};

struct EmptyInput : Error {
    using Error::Error;
};

// rate_fit window contains fewer than two positive samples.
struct NonPositiveTrace : Error {
    using Error::Error;
};

// Configuration fails a validated prerequisite; message names the assumption.
struct ConfigInvalid : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

struct SingularSystem : Error {
    using Error::Error;
};

}  // namespace eftqdi
