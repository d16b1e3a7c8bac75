#pragma once

namespace optospring {

/// Physical constants used throughout the library (CODATA 2018, exact or
/// recommended values). Passed by value so validation code can perturb them.
struct Constants {
    double speed_of_light = 2.99792458e8;     // m/s
    double hbar = 1.054571817e-34;            // J s
};

inline constexpr Constants kCodata{};

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kHalfPi = 0.5 * kPi;
inline constexpr double kSqrt2 = 1.41421356237309504880;

// Small-frequency regime limit for the reduced model (x, x0 << 1).
inline constexpr double kSmallFrequencyLimit = 0.3;

} // namespace optospring
