#pragma once

#include "optospring/model_params.hpp"
#include "optospring/spectrum.hpp"

#include <complex>
#include <span>
#include <string_view>
#include <vector>

namespace optospring {

enum class HomodyneMode {
    Fixed,
    ExtremalA,            // theta_1(x_c): amplitude-readout noise cancelled at x_c
    ExtremalPhi,          // theta_2(x_c): phase-readout noise cancelled at x_c
    OptimalPerFrequency,  // best of theta_1(x), theta_2(x) at every x
};

std::string_view to_string(HomodyneMode mode);

struct HomodyneSetting {
    HomodyneMode mode = HomodyneMode::Fixed;
    double theta = 0.0;  // rad, Fixed only; taken modulo pi
    double x_c = 0.0;    // Extremal modes only
};

/// Output quadrature a_theta = noise_a * a_a + noise_phi * a_phi + signal * f_s.
/// damping = gamma_m / gamma0 extends the mechanics with viscous loss.
struct QuadratureGains {
    std::complex<double> noise_a;
    std::complex<double> noise_phi;
    std::complex<double> signal;
};

QuadratureGains quadrature_transfer(double x, double theta, const DimensionlessModel& model,
                                    double damping = 0.0);

struct ForceNoise {
    double s_f = 0.0;
    double s_a1 = 0.0;    // amplitude-quadrature input contribution
    double s_phi1 = 0.0;  // phase-quadrature input contribution
};

// Force-referred noise PSD, SQL = 1.
ForceNoise force_noise_psd(double x, double theta, const DimensionlessModel& model,
                           double damping = 0.0);

// Closed forms of S_f for amplitude (theta = 0) and phase (theta = pi/2) readout.
double force_noise_amplitude_readout(double x, const DimensionlessModel& model);
double force_noise_phase_readout(double x, const DimensionlessModel& model);

struct ExtremalAngles {
    double theta_1 = 0.0;  // S_a1(x_c) = 0
    double theta_2 = 0.0;  // S_phi1(x_c) = 0
};

// Both angles in [0, pi).
ExtremalAngles extremal_angles(double x_c, const DimensionlessModel& model);

// Better of the two extremal angles at x; this is the global minimum over theta.
double optimal_force_angle(double x, const DimensionlessModel& model);

// Angle used at x for a given setting.
double resolve_force_angle(const HomodyneSetting& setting, double x,
                           const DimensionlessModel& model);

/// S_f at the spring resonance for amplitude and phase readout, each in two
/// algebraically equal forms.
struct ResonanceMinima {
    double amplitude_readout = 0.0;      // p_m / 2
    double amplitude_readout_alt = 0.0;  // x0^2 g
    double phase_readout = 0.0;          // q_m D^2 / (2 x0^2)
    double phase_readout_alt = 0.0;      // 1 / g
};

ResonanceMinima resonance_minima(const DimensionlessModel& model);

/// Width of the S_f dip around x0 at twice its minimum.
struct DetectionBandwidth {
    double x_min = 0.0;  // location of the minimum
    double s_min = 0.0;
    double x_lo = 0.0;   // S_f(x_lo) = 2 s_min, x_lo < x_min
    double x_hi = 0.0;
    double full_width = 0.0;      // x_hi - x_lo
    double centered_width = 0.0;  // 2 min(x0 - x_lo, x_hi - x0): band x0 +- Gamma/2 inside the dip
    double gamma = 0.0;           // centered_width * gamma0, rad/s
    double ratio = 0.0;           // Gamma / Omega0 = centered_width / x0
    double full_ratio = 0.0;      // full_width / x0
};

DetectionBandwidth detection_bandwidth(const DimensionlessModel& model, double theta);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

// Maximal sub-intervals of the grid span on which S_f < 1.
std::vector<Interval> sql_crossings(const DimensionlessModel& model, double theta,
                                    std::span<const double> grid);

// Channels s_f, s_a1, s_phi1, theta_used.
SpectrumResult force_spectrum(const DimensionlessModel& model, const HomodyneSetting& setting,
                              std::span<const double> grid, double damping = 0.0);

} // namespace optospring
