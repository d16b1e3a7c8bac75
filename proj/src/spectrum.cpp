#include "optospring/spectrum.hpp"

#include "optospring/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace optospring {

const std::vector<double>& SpectrumResult::channel(std::string_view name) const
{
    for (const auto& ch : channels) {
        if (ch.name == name) {
            return ch.values;
        }
    }
    throw std::out_of_range("no spectrum channel named " + std::string(name));
}

std::vector<double>& SpectrumResult::add_channel(std::string name)
{
    channels.push_back({std::move(name), std::vector<double>(x.size(), 0.0)});
    return channels.back().values;
}

void SpectrumResult::set_grid(std::span<const double> grid, double gamma0)
{
    x.assign(grid.begin(), grid.end());
    omega.resize(x.size());
    std::transform(x.begin(), x.end(), omega.begin(), [gamma0](double v) { return v * gamma0; });
}

std::vector<double> log_grid(double lo, double hi, std::size_t points)
{
    if (!(lo > 0.0) || !(hi > lo) || points < 2) {
        throw DomainError("log grid needs 0 < lo < hi and at least two points");
    }
    std::vector<double> grid(points);
    const double step = std::log(hi / lo) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) {
        grid[i] = lo * std::exp(step * static_cast<double>(i));
    }
    grid.back() = hi;
    return grid;
}

std::vector<double> lin_grid(double lo, double hi, std::size_t points)
{
    if (!(lo > 0.0) || !(hi > lo) || points < 2) {
        throw DomainError("linear grid needs 0 < lo < hi and at least two points");
    }
    std::vector<double> grid(points);
    const double step = (hi - lo) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) {
        grid[i] = lo + step * static_cast<double>(i);
    }
    grid.back() = hi;
    return grid;
}

std::vector<double> default_grid(const DimensionlessModel& model)
{
    if (!(model.x0 > 0.0)) {
        throw DomainError("default grid is centred on x0, which is zero for this model");
    }
    return log_grid(model.x0 / 30.0, 30.0 * model.x0, 2000);
}

void add_regime_warnings(SpectrumResult& result, const DimensionlessModel& model)
{
    if (model.outside_small_frequency_regime()) {
        std::ostringstream msg;
        msg << "x0 = " << model.x0 << " is outside the small-frequency regime (x0 < "
            << kSmallFrequencyLimit << ")";
        result.warnings.push_back(msg.str());
    }
    if (!result.x.empty() && result.x.back() > kSmallFrequencyLimit) {
        std::ostringstream msg;
        msg << "grid extends to x = " << result.x.back() << "; reduced formulas assume x < "
            << kSmallFrequencyLimit;
        result.warnings.push_back(msg.str());
    }
}

double reduce_angle(double theta)
{
    double t = std::fmod(theta, kPi);
    if (t < 0.0) {
        t += kPi;
    }
    if (t >= kPi) {
        t -= kPi;
    }
    return t + 0.0;  // no negative zero
}

Phasor unit_phasor(double theta)
{
    const double t = reduce_angle(theta);
    if (t == 0.0) {
        return {1.0, 0.0};
    }
    if (t == kHalfPi) {
        return {0.0, 1.0};
    }
    return {std::cos(t), std::sin(t)};
}

} // namespace optospring
