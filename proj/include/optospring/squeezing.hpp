#pragma once

#include "optospring/force_sensing.hpp"
#include "optospring/model_params.hpp"
#include "optospring/spectrum.hpp"

#include <span>

namespace optospring {

/// S_theta(x) = (w + u cos 2 theta + v sin 2 theta) / denom.
struct WuvTriple {
    double w = 0.0;
    double u = 0.0;
    double v = 0.0;
    double denom = 0.0;  // (x0^2 - x^2)^2 + 4 x^2 x0^4
};

// Throws PureCouplingError unless 0 < g < inf, DomainError for x < 0 or no spring.
WuvTriple wuv(double x, const DimensionlessModel& model);

// (W^2 - U^2 - V^2) / denom^2 - 1, evaluated in extended precision.
double uncertainty_residual(double x, const DimensionlessModel& model);

/// Output-quadrature PSD, vacuum = 1. damping = gamma_m / gamma0 adds
/// intrinsic mechanical loss; 0 gives the lossless model.
double output_quadrature_psd(double x, double theta, const DimensionlessModel& model,
                             double damping = 0.0);

struct OptimalAngle {
    double theta = 0.0;       // [0, pi)
    bool indifferent = false; // S_theta(x_c) independent of theta; theta = 0 then
};

OptimalAngle optimal_angle_at(double x_c, const DimensionlessModel& model);

/// Homodyne angle fixed at its optimum for x_c, evaluated on the whole grid.
/// Channels: s_theta, theta_used, s_envelope (per-frequency optimum).
/// Throws AngleIndifferentError when x_c is a coherent point.
SpectrumResult optimal_psd_curve(double x_c, std::span<const double> grid,
                                 const DimensionlessModel& model);

// Floor of the optimal PSD for x << x0: (sqrt(1+g^2) - 1) / (sqrt(1+g^2) + 1).
double low_freq_limit(double g);

// Detuned purely dispersive reference, (Delta / gamma0)^2.
double dispersive_reference(double detuning_ratio);

struct SqueezeExtremes {
    double s_min = 0.0;
    double s_max = 0.0;
    double product = 0.0;
};

SqueezeExtremes squeeze_minmax(double x, const DimensionlessModel& model);

// 10 log10(s); negative means squeezed.
double to_db(double s);

/// Squeezing table for a homodyne setting. Fixed and Extremal* modes use
/// their force-sensing angle; OptimalPerFrequency uses optimal_angle_at(x_c)
/// when x_c > 0 and the per-frequency optimum otherwise.
/// Channels: s_theta, s_min, s_max, theta_opt (per-frequency optimum), s_db, theta_used.
SpectrumResult squeeze_spectrum(const DimensionlessModel& model, const HomodyneSetting& setting,
                                std::span<const double> grid);

} // namespace optospring
