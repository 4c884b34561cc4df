#pragma once

#include <stdexcept>
#include <string>

namespace cmscan {

/* Every failure the library reports deliberately goes through one of the
 * types below, so callers can distinguish "your input is bad" from "the
 * computation could not be carried to the requested precision".  Anything
 * else escaping is a bug. */

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/* --- input errors ------------------------------------------------------ */

struct ZeroInput : Error {
    using Error::Error;
};

struct DivergentInput : Error {
    using Error::Error;
};

struct InvalidDiscriminant : Error {
    using Error::Error;
};

struct NotImaginaryQuadratic : Error {
    using Error::Error;
};

struct UnsupportedDegree : Error {
    using Error::Error;
};

struct NotOnCurve : Error {
    using Error::Error;
};

struct PoleOfSection : Error {
    using Error::Error;
};

struct SingularFiber : Error {
    using Error::Error;
};

/* --- numerical failures ------------------------------------------------ */

struct NonConvergence : Error {
    using Error::Error;
};

/* The requested quantity is not representable at the working precision,
 * e.g. theta series at Im(tau) below the cutoff, or catastrophic
 * cancellation detected by a consistency identity. */
struct PrecisionLoss : Error {
    using Error::Error;
};

struct PrecisionTooLow : Error {
    using Error::Error;
};

struct RootIsolationFailure : Error {
    using Error::Error;
};

struct NearSingularSlope : Error {
    using Error::Error;
};

struct NoRelationFound : Error {
    using Error::Error;
};

} // namespace cmscan
