#pragma once

#include <stdexcept>

namespace vp {

// Base type for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidArgumentError : Error {
  using Error::Error;
};

// Calibration target at or below chance level, or malformed profile.
struct InvalidCalibrationError : Error {
  using Error::Error;
};

// Fixture predictor asked for a sample id it does not hold.
struct MissingFixtureError : Error {
  using Error::Error;
};

// Fixture file with a bad header or wrong row width.
struct FixtureFormatError : Error {
  using Error::Error;
};

// Wire contract violation: bad magic or version, unknown message type,
// duplicate variant in one response set.
struct ProtocolError : Error {
  using Error::Error;
};

// Frame or payload shorter than its declared layout, or with
// out-of-range contents (class index >= C).
struct CorruptPayloadError : Error {
  using Error::Error;
};

// Scaling context with an empty resolution or width-factor set.
struct InvalidContextError : Error {
  using Error::Error;
};

// Collection window closed with zero contributions.
struct NoResultError : Error {
  using Error::Error;
};

}  // namespace vp
