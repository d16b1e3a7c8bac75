#pragma once

#include "optospring/model_params.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace optospring {

struct Channel {
    std::string name;
    std::vector<double> values;
};

/// Frequency grid plus named PSD channels. x = Omega / gamma0 is the primary
/// axis; omega is derived from it.
struct SpectrumResult {
    std::vector<double> x;
    std::vector<double> omega;  // rad/s
    std::vector<Channel> channels;
    std::string normalization = "single-sided, vacuum = 1, force normalized to SQL f_s";
    std::vector<std::string> warnings;

    // Throws std::out_of_range for an unknown name.
    const std::vector<double>& channel(std::string_view name) const;
    std::vector<double>& add_channel(std::string name);

    void set_grid(std::span<const double> grid, double gamma0);
};

std::vector<double> log_grid(double lo, double hi, std::size_t points);
std::vector<double> lin_grid(double lo, double hi, std::size_t points);

// Logarithmic grid over [x0/30, 30 x0] with 2000 points.
std::vector<double> default_grid(const DimensionlessModel& model);

// Appends the small-frequency regime warnings for this grid and model.
void add_regime_warnings(SpectrumResult& result, const DimensionlessModel& model);

// Homodyne angle reduced to [0, pi); cos/sin snapped exactly at 0 and pi/2.
struct Phasor {
    double c = 1.0;
    double s = 0.0;
};

double reduce_angle(double theta);
Phasor unit_phasor(double theta);

} // namespace optospring
