#pragma once

#include <numbers>

namespace gasphs {

inline constexpr double kPi = std::numbers::pi;

/// Standard gravitational acceleration [m/s^2].
inline constexpr double kGravity = 9.80665;

/// Reynolds number separating the laminar and turbulent friction closures.
inline constexpr double kCriticalReynolds = 2300.0;

/// Velocity bound of the slow-flow momentum simplification [m/s].
inline constexpr double kSlowFlowVelocityLimit = 15.0;

namespace units {
inline constexpr double kPaPerBar = 1.0e5;
inline constexpr double kMetersPerKm = 1.0e3;
inline constexpr double kMetersPerMm = 1.0e-3;
inline constexpr double kKelvinOffset = 273.15;
inline constexpr double kSecondsPerHour = 3600.0;
inline constexpr double kSecondsPerMinute = 60.0;
}  // namespace units

}  // namespace gasphs
