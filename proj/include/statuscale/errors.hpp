#pragma once

#include <stdexcept>
#include <string>

namespace statuscale {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Trace ingestion / synthesis.
struct EmptyTrace : Error {
    EmptyTrace() : Error("trace contains no usable samples") {}
};
struct SchemaMismatch : Error {
    explicit SchemaMismatch(const std::string& what) : Error("schema mismatch: " + what) {}
};
struct BurstOutOfRange : Error {
    explicit BurstOutOfRange(const std::string& what) : Error("burst out of range: " + what) {}
};

// Numeric preconditions.
struct DegenerateAbscissa : Error {
    DegenerateAbscissa() : Error("all timestamps in the window coincide; line fit is singular") {}
};
struct ZeroMeanWindow : Error {
    ZeroMeanWindow() : Error("window mean is zero; coefficient of variation undefined") {}
};
struct InsufficientData : Error {
    explicit InsufficientData(const std::string& what) : Error("insufficient data: " + what) {}
};
struct SeriesLengthMismatch : Error {
    SeriesLengthMismatch() : Error("series lengths differ") {}
};

struct ConstantSeries : Error {
    ConstantSeries() : Error("series is constant; scale normalization undefined") {}
};

// Model usage.
struct FeatureShapeMismatch : Error {
    explicit FeatureShapeMismatch(const std::string& what) : Error("feature shape mismatch: " + what) {}
};
struct NotFitted : Error {
    NotFitted() : Error("model has not been fitted") {}
};
struct DetectorColdStart : Error {
    DetectorColdStart() : Error("detector has no fitted lines yet") {}
};

// Control loop.
struct MeasurementInvalid : Error {
    MeasurementInvalid() : Error("measurement is not finite") {}
};
struct ProfileSaturated : Error {
    explicit ProfileSaturated(const std::string& what) : Error("profile saturated: " + what) {}
};

// Configuration.
struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error("config error: " + what) {}
};
struct ConstraintViolated : Error {
    explicit ConstraintViolated(const std::string& what) : Error("constraint violated: " + what) {}
};

}  // namespace statuscale
