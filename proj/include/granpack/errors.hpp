#pragma once

#include <stdexcept>
#include <string>

namespace granpack {

// Base class for everything this library throws.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// -- input / parsing ---------------------------------------------------------
struct EmptyInput : Error {
    explicit EmptyInput(const std::string& msg) : Error(msg) {}
};
struct MalformedRow : Error {
    explicit MalformedRow(const std::string& msg) : Error(msg) {}
};
struct NonMonotone : Error {
    explicit NonMonotone(const std::string& msg) : Error(msg) {}
};
struct DuplicateDiameter : Error {
    explicit DuplicateDiameter(const std::string& msg) : Error(msg) {}
};
struct InvalidCurve : Error {
    explicit InvalidCurve(const std::string& msg) : Error(msg) {}
};
struct IoError : Error {
    explicit IoError(const std::string& msg) : Error(msg) {}
};

// -- sampling / numerics -----------------------------------------------------
struct DegenerateHistogram : Error {
    explicit DegenerateHistogram(const std::string& msg) : Error(msg) {}
};
struct EmptySample : Error {
    explicit EmptySample(const std::string& msg) : Error(msg) {}
};
struct DomainError : Error {
    explicit DomainError(const std::string& msg) : Error(msg) {}
};
struct NonFinite : Error {
    explicit NonFinite(const std::string& msg) : Error(msg) {}
};
struct QuadratureFailure : Error {
    explicit QuadratureFailure(const std::string& msg) : Error(msg) {}
};
struct RejectionStall : Error {
    explicit RejectionStall(const std::string& msg) : Error(msg) {}
};

// -- fitting -----------------------------------------------------------------
struct NonConvergence : Error {
    explicit NonConvergence(const std::string& msg) : Error(msg) {}
};
struct DegenerateSample : Error {
    explicit DegenerateSample(const std::string& msg) : Error(msg) {}
};
struct TooFewSamples : Error {
    explicit TooFewSamples(const std::string& msg) : Error(msg) {}
};
struct NoConvergedFit : Error {
    explicit NoConvergedFit(const std::string& msg) : Error(msg) {}
};

// -- packing -----------------------------------------------------------------
struct NonFiniteMoment : Error {
    explicit NonFiniteMoment(const std::string& msg) : Error(msg) {}
};
struct FirstParticleFailed : Error {
    explicit FirstParticleFailed(const std::string& msg) : Error(msg) {}
};

// -- reports -----------------------------------------------------------------
struct SchemaMismatch : Error {
    explicit SchemaMismatch(const std::string& msg) : Error(msg) {}
};

} // namespace granpack
