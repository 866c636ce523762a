#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ftsim {

using Real = double;

/// Default comparison tolerance for times, levels and rates.
inline constexpr Real kTol = 1e-9;

inline constexpr Real kInf = std::numeric_limits<Real>::infinity();

[[nodiscard]] inline bool nearly_equal(Real a, Real b, Real tol = kTol) {
  return std::abs(a - b) <= tol;
}

[[nodiscard]] inline bool is_finite(Real a) { return std::isfinite(a); }

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NegativeInitialCondition : Error { using Error::Error; };
struct DomainMismatch : Error { using Error::Error; };
struct HistoryGap : Error { using Error::Error; };
struct NonfiniteInput : Error { using Error::Error; };
struct SpectralRadiusError : Error { using Error::Error; };
struct UnstableNetwork : Error { using Error::Error; };
struct MonotonicityViolated : Error { using Error::Error; };
struct MaxPeriodsExceeded : Error { using Error::Error; };
struct ShapeMismatch : Error { using Error::Error; };
struct WindowNotCovered : Error { using Error::Error; };
struct NoThroughput : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };
struct CapacityExceededAtInit : Error { using Error::Error; };
struct ChatteringSuspected : Error { using Error::Error; };
struct ConfigParseError : Error { using Error::Error; };

}  // namespace ftsim
