#pragma once

#include <stdexcept>
#include <string>

namespace rocket {

// Base class for all library errors. Callers that want to distinguish
// failure modes catch the concrete types below.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class DataError : public Error {
public:
    using Error::Error;
};

// matrix / linear algebra
class NonPositiveDiagonal : public Error {
public:
    using Error::Error;
};
class IllConditioned : public Error {
public:
    using Error::Error;
};
class NotPositiveDefinite : public Error {
public:
    using Error::Error;
};
class CholeskyFailure : public Error {
public:
    using Error::Error;
};
class SingularTheta : public Error {
public:
    using Error::Error;
};
class DimensionTooLarge : public Error {
public:
    using Error::Error;
};
class DimensionMismatch : public Error {
public:
    using Error::Error;
};

// rank statistics
class LengthMismatch : public Error {
public:
    using Error::Error;
};
class TooFewSamples : public Error {
public:
    using Error::Error;
};

// samplers
class RateOutOfRange : public Error {
public:
    using Error::Error;
};
class DegenerateIndicator : public Error {
public:
    using Error::Error;
};
class InsufficientRows : public Error {
public:
    using Error::Error;
};

// regression
class NonUnitDiagonal : public Error {
public:
    using Error::Error;
};
class RadiusExceeded : public Error {
public:
    using Error::Error;
};

// inference
class ZeroVariance : public Error {
public:
    using Error::Error;
};
class ConstantColumn : public Error {
public:
    using Error::Error;
};
class DegenerateDenominator : public Error {
public:
    using Error::Error;
};

} // namespace rocket
