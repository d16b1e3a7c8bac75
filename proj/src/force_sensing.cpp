#include "optospring/force_sensing.hpp"

#include "optospring/errors.hpp"

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

namespace optospring {

namespace {

constexpr std::uintmax_t kBisectionCap = 80;
constexpr double kBisectionTol = 1e-12;
constexpr double kPointsPerDecade = 256.0;

double signed_spring(const DimensionlessModel& model)
{
    return (model.imaginary_spring ? -1.0 : 1.0) * model.x0 * model.x0;
}

void require_positive_frequency(double x)
{
    if (!(x > 0.0) || !std::isfinite(x)) {
        std::ostringstream msg;
        msg << "x must be positive and finite (got " << x
            << "); the signal gain vanishes at x = 0 (free-mass divergence)";
        throw SingularityError(msg.str());
    }
}

void require_spring(const DimensionlessModel& model)
{
    if (!(model.x0 > 0.0)) {
        throw DomainError("model has no optical spring (x0 = 0)");
    }
}

template <class F>
double bisect_root(F f, double lo, double hi)
{
    std::uintmax_t iterations = kBisectionCap;
    const auto tol = [](double a, double b) {
        return std::abs(b - a) <= kBisectionTol * std::min(std::abs(a), std::abs(b));
    };
    const auto bracket = boost::math::tools::bisect(f, lo, hi, tol, iterations);
    return 0.5 * (bracket.first + bracket.second);
}

} // namespace

std::string_view to_string(HomodyneMode mode)
{
    switch (mode) {
    case HomodyneMode::Fixed: return "fixed";
    case HomodyneMode::ExtremalA: return "extremal_a";
    case HomodyneMode::ExtremalPhi: return "extremal_phi";
    case HomodyneMode::OptimalPerFrequency: return "optimal";
    }
    return "?";
}

QuadratureGains quadrature_transfer(double x, double theta, const DimensionlessModel& model,
                                    double damping)
{
    require_positive_frequency(x);
    const Phasor p = unit_phasor(theta);
    const double a = signed_spring(model) - x * x;
    const double alpha = model.qm_d2();
    const double beta = model.p_m * x * x;
    const std::complex<double> a_loss(a, -x * damping);
    // Antidamping from the viscosity delta_m opposes intrinsic loss.
    const std::complex<double> den(a, -x * (damping - model.delta_m));

    QuadratureGains gains;
    gains.noise_a = (a_loss * p.c + alpha * p.s) / den;
    gains.noise_phi = (-beta * p.c + a_loss * p.s) / den;
    gains.signal = std::complex<double>(-x * std::sqrt(2.0 * alpha) * p.s,
                                        -x * x * std::sqrt(2.0 * model.p_m) * p.c) /
                   den;
    return gains;
}

ForceNoise force_noise_psd(double x, double theta, const DimensionlessModel& model, double damping)
{
    require_positive_frequency(x);
    const Phasor p = unit_phasor(theta);
    const double a = signed_spring(model) - x * x;
    const double alpha = model.qm_d2();
    const double beta = model.p_m * x * x;
    const double loss2 = x * x * damping * damping;

    const double den = 2.0 * x * x * (beta * p.c * p.c + alpha * p.s * p.s);
    if (!(den > 0.0)) {
        std::ostringstream msg;
        msg << "no signal reaches the quadrature theta = " << theta << " for this model";
        throw SingularityError(msg.str());
    }
    const double num_a = (a * p.c + alpha * p.s) * (a * p.c + alpha * p.s) + loss2 * p.c * p.c;
    const double num_phi = (-beta * p.c + a * p.s) * (-beta * p.c + a * p.s) + loss2 * p.s * p.s;

    ForceNoise n;
    n.s_a1 = num_a / den;
    n.s_phi1 = num_phi / den;
    n.s_f = n.s_a1 + n.s_phi1;
    return n;
}

double force_noise_amplitude_readout(double x, const DimensionlessModel& model)
{
    require_positive_frequency(x);
    if (!(model.p_m > 0.0)) {
        throw SingularityError("amplitude readout carries no signal when p_m = 0");
    }
    const double r = model.x0 / x;
    const double detune = (model.imaginary_spring ? -1.0 : 1.0) * r * r - 1.0;
    return 0.5 * (model.p_m + detune * detune / model.p_m);
}

double force_noise_phase_readout(double x, const DimensionlessModel& model)
{
    require_positive_frequency(x);
    const double alpha = model.qm_d2();
    if (!(alpha > 0.0)) {
        throw SingularityError("phase readout carries no signal when q_m = 0");
    }
    const double a = signed_spring(model) - x * x;
    return (alpha + a * a / alpha) / (2.0 * x * x);
}

ExtremalAngles extremal_angles(double x_c, const DimensionlessModel& model)
{
    if (!(x_c > 0.0) || !std::isfinite(x_c)) {
        throw DomainError("extremal angles need x_c > 0");
    }
    const double a = signed_spring(model) - x_c * x_c;
    ExtremalAngles angles;
    angles.theta_1 = reduce_angle(std::atan2(-a, model.qm_d2()));
    angles.theta_2 = reduce_angle(std::atan2(model.p_m * x_c * x_c, a));
    return angles;
}

double optimal_force_angle(double x, const DimensionlessModel& model)
{
    const ExtremalAngles e = extremal_angles(x, model);
    const auto value = [&](double theta) {
        try {
            return force_noise_psd(x, theta, model).s_f;
        } catch (const SingularityError&) {
            return std::numeric_limits<double>::infinity();
        }
    };
    return value(e.theta_1) <= value(e.theta_2) ? e.theta_1 : e.theta_2;
}

double resolve_force_angle(const HomodyneSetting& setting, double x,
                           const DimensionlessModel& model)
{
    switch (setting.mode) {
    case HomodyneMode::Fixed: return reduce_angle(setting.theta);
    case HomodyneMode::ExtremalA: return extremal_angles(setting.x_c, model).theta_1;
    case HomodyneMode::ExtremalPhi: return extremal_angles(setting.x_c, model).theta_2;
    case HomodyneMode::OptimalPerFrequency: return optimal_force_angle(x, model);
    }
    throw DomainError("unknown homodyne mode");
}

ResonanceMinima resonance_minima(const DimensionlessModel& model)
{
    require_spring(model);
    const double x0 = model.x0;
    ResonanceMinima r;
    r.amplitude_readout = 0.5 * model.p_m;
    r.amplitude_readout_alt = x0 * x0 * model.coupling_ratio;
    r.phase_readout = model.qm_d2() / (2.0 * x0 * x0);
    r.phase_readout_alt = 1.0 / model.coupling_ratio;
    return r;
}

DetectionBandwidth detection_bandwidth(const DimensionlessModel& model, double theta)
{
    require_spring(model);
    const double x0 = model.x0;
    const auto s_f = [&](double x) { return force_noise_psd(x, theta, model).s_f; };

    const std::size_t points = static_cast<std::size_t>(2.0 * kPointsPerDecade) + 1;
    std::vector<double> grid = log_grid(x0 / 10.0, 10.0 * x0, points);
    // Narrow dips (weak dissipative coupling) fall between scan points.
    grid.insert(std::upper_bound(grid.begin(), grid.end(), x0), x0);
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    std::vector<double> values(grid.size());
    std::transform(grid.begin(), grid.end(), values.begin(), s_f);

    const auto it = std::min_element(values.begin(), values.end());
    const auto i = static_cast<std::size_t>(it - values.begin());
    if (i == 0 || i + 1 == grid.size()) {
        throw BandwidthUndefinedError("S_f has no interior minimum in [x0/10, 10 x0]");
    }
    auto [x_min, s_min] = boost::math::tools::brent_find_minima(
        s_f, grid[i - 1], grid[i + 1], std::numeric_limits<double>::digits / 2);
    if (values[i] < s_min) {
        x_min = grid[i];
        s_min = values[i];
    }

    const double target = 2.0 * s_min;
    const auto excess = [&](double x) { return s_f(x) - target; };

    std::size_t lo = i;
    while (lo > 0 && values[lo] < target) {
        --lo;
    }
    std::size_t hi = i;
    while (hi + 1 < grid.size() && values[hi] < target) {
        ++hi;
    }
    if (values[lo] < target || values[hi] < target) {
        throw BandwidthUndefinedError("S_f stays below twice its minimum at the edge of [x0/10, 10 x0]");
    }

    DetectionBandwidth bw;
    bw.x_min = x_min;
    bw.s_min = s_min;
    bw.x_lo = grid[lo] == x_min ? x_min : bisect_root(excess, grid[lo], x_min);
    bw.x_hi = grid[hi] == x_min ? x_min : bisect_root(excess, x_min, grid[hi]);
    bw.full_width = bw.x_hi - bw.x_lo;
    const double half = std::min(x0 - bw.x_lo, bw.x_hi - x0);
    if (!(half > 0.0)) {
        throw BandwidthUndefinedError("x0 lies outside the dip; no band centred on the resonance");
    }
    bw.centered_width = 2.0 * half;
    bw.gamma = bw.centered_width * model.gamma0;
    bw.ratio = bw.centered_width / x0;
    bw.full_ratio = bw.full_width / x0;
    return bw;
}

std::vector<Interval> sql_crossings(const DimensionlessModel& model, double theta,
                                    std::span<const double> grid)
{
    std::vector<Interval> out;
    if (grid.empty()) {
        return out;
    }
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (!(grid[k] > 0.0) || (k > 0 && !(grid[k] > grid[k - 1]))) {
            throw DomainError("sql_crossings needs a positive, strictly increasing grid");
        }
    }
    // Strict margin so that S_f == 1 up to rounding does not count as a crossing.
    const double level = 1.0 - 1e-12;
    const auto excess = [&](double x) { return force_noise_psd(x, theta, model).s_f - level; };

    bool inside = excess(grid[0]) < 0.0;
    double start = grid[0];
    for (std::size_t k = 1; k < grid.size(); ++k) {
        const bool now = excess(grid[k]) < 0.0;
        if (now == inside) {
            continue;
        }
        const double edge = bisect_root(excess, grid[k - 1], grid[k]);
        if (now) {
            start = edge;
        } else {
            out.push_back({start, edge});
        }
        inside = now;
    }
    if (inside) {
        out.push_back({start, grid.back()});
    }
    return out;
}

SpectrumResult force_spectrum(const DimensionlessModel& model, const HomodyneSetting& setting,
                              std::span<const double> grid, double damping)
{
    SpectrumResult result;
    result.set_grid(grid, model.gamma0);
    auto& s_f = result.add_channel("s_f");
    auto& s_a1 = result.add_channel("s_a1");
    auto& s_phi1 = result.add_channel("s_phi1");
    auto& theta_used = result.add_channel("theta_used");
    for (std::size_t k = 0; k < result.x.size(); ++k) {
        const double theta = resolve_force_angle(setting, result.x[k], model);
        const ForceNoise n = force_noise_psd(result.x[k], theta, model, damping);
        s_f[k] = n.s_f;
        s_a1[k] = n.s_a1;
        s_phi1[k] = n.s_phi1;
        theta_used[k] = theta;
    }
    add_regime_warnings(result, model);
    return result;
}

} // namespace optospring
