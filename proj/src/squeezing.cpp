#include "optospring/squeezing.hpp"

#include "optospring/errors.hpp"

#include <cmath>
#include <sstream>

namespace optospring {

namespace {

// Quad precision: S_min = (W - |(U, V)|) / denom cancels catastrophically
// when S_max / S_min is large.
__extension__ typedef __float128 real;

real qsqrt(real v)
{
    if (!(v > 0)) {
        return 0;
    }
    real r = std::sqrt(static_cast<long double>(v));
    r = (r + v / r) / 2;
    return (r + v / r) / 2;
}

real qhypot(real a, real b) { return qsqrt(a * a + b * b); }

const real kIndifference = static_cast<real>(1e-14);

struct WuvQuad {
    real w, u, v, denom;
};

void require_squeezing_model(const DimensionlessModel& model)
{
    const double g = model.coupling_ratio;
    if (!(g > 0.0) || !std::isfinite(g)) {
        throw PureCouplingError(
            "squeezing formulas need both couplings (0 < g < inf); use the pure-coupling limits");
    }
    if (!(model.x0 > 0.0)) {
        throw DomainError("squeezing formulas need a spring (x0 > 0)");
    }
    if (model.imaginary_spring) {
        throw DomainError("squeezing formulas assume a restoring spring (xi * eta < 0)");
    }
}

void require_frequency(double x)
{
    if (!(x >= 0.0) || !std::isfinite(x)) {
        std::ostringstream msg;
        msg << "x must be non-negative and finite (got " << x << ")";
        throw DomainError(msg.str());
    }
}

WuvQuad wuv_quad(double x_in, const DimensionlessModel& model)
{
    require_squeezing_model(model);
    require_frequency(x_in);
    const real x = x_in;
    const real x0 = model.x0;
    const real g = model.coupling_ratio;
    const real x2 = x * x;
    const real x02 = x0 * x0;
    const real x04 = x02 * x02;
    const real a = x02 - x2;
    WuvQuad r;
    r.w = a * a + 2 * x04 / (g * g) + 2 * x2 * x2 * x04 * g * g;
    r.u = 2 * x02 * (x2 * x2 * x02 * g * g - x02 / (g * g));
    r.v = 2 * x02 * a * (1 / g - x2 * g);
    r.denom = a * a + 4 * x2 * x04;
    return r;
}

double per_frequency_optimum(const WuvQuad& t)
{
    const real h = qhypot(t.u, t.v);
    if (h <= kIndifference * t.w) {
        return 0.0;
    }
    const auto u = static_cast<long double>(t.u);
    const auto v = static_cast<long double>(t.v);
    return reduce_angle(0.5 * static_cast<double>(std::atan2(-v, -u)));
}

} // namespace

WuvTriple wuv(double x, const DimensionlessModel& model)
{
    const WuvQuad t = wuv_quad(x, model);
    return {static_cast<double>(t.w), static_cast<double>(t.u), static_cast<double>(t.v),
            static_cast<double>(t.denom)};
}

double uncertainty_residual(double x, const DimensionlessModel& model)
{
    const WuvQuad t = wuv_quad(x, model);
    const real d2 = t.denom * t.denom;
    return static_cast<double>((t.w * t.w - t.u * t.u - t.v * t.v - d2) / d2);
}

double output_quadrature_psd(double x_in, double theta, const DimensionlessModel& model,
                             double damping)
{
    require_squeezing_model(model);
    require_frequency(x_in);
    if (!(damping >= 0.0)) {
        throw DomainError("damping must be non-negative");
    }
    const Phasor p = unit_phasor(theta);
    const real c = p.c;
    const real s = p.s;
    const real x = x_in;
    const real x0 = model.x0;
    const real g = model.coupling_ratio;
    const real x2 = x * x;
    const real x02 = x0 * x0;
    const real x04 = x02 * x02;
    const real a = x02 - x2;
    const real loss = x * static_cast<real>(damping);
    const real net = 2 * x02 - static_cast<real>(damping);

    const real num = a * a + 4 * x04 * (s * s / (g * g) + x2 * x2 * g * g * c * c) +
                     4 * x02 * a * s * c * (1 / g - x2 * g) + loss * loss;
    const real den = a * a + x2 * net * net;
    if (!(den > 0)) {
        throw SingularityError("output PSD pole: net mechanical damping vanishes at resonance");
    }
    return static_cast<double>(num / den);
}

OptimalAngle optimal_angle_at(double x_c, const DimensionlessModel& model)
{
    const WuvQuad t = wuv_quad(x_c, model);
    OptimalAngle out;
    out.indifferent = qhypot(t.u, t.v) <= kIndifference * t.w;
    out.theta = per_frequency_optimum(t);
    return out;
}

SpectrumResult optimal_psd_curve(double x_c, std::span<const double> grid,
                                 const DimensionlessModel& model)
{
    const WuvQuad c = wuv_quad(x_c, model);
    const real hc = qhypot(c.u, c.v);
    if (hc <= kIndifference * c.w) {
        std::ostringstream msg;
        msg << "x_c = " << x_c << " is a coherent point; every homodyne angle is optimal";
        throw AngleIndifferentError(msg.str());
    }
    const double theta = per_frequency_optimum(c);

    SpectrumResult result;
    result.set_grid(grid, model.gamma0);
    auto& s_theta = result.add_channel("s_theta");
    auto& theta_used = result.add_channel("theta_used");
    auto& envelope = result.add_channel("s_envelope");
    for (std::size_t k = 0; k < result.x.size(); ++k) {
        const WuvQuad t = wuv_quad(result.x[k], model);
        s_theta[k] = static_cast<double>((t.w - (t.u * c.u + t.v * c.v) / hc) / t.denom);
        theta_used[k] = theta;
        envelope[k] = static_cast<double>((t.w - qhypot(t.u, t.v)) / t.denom);
    }
    add_regime_warnings(result, model);
    return result;
}

double low_freq_limit(double g)
{
    if (!(g > 0.0) || !std::isfinite(g)) {
        throw DomainError("low-frequency limit needs 0 < g < inf");
    }
    const double root = 1.0 + std::sqrt(1.0 + g * g);
    return g * g / (root * root);
}

double dispersive_reference(double detuning_ratio)
{
    if (!std::isfinite(detuning_ratio)) {
        throw DomainError("detuning ratio must be finite");
    }
    return detuning_ratio * detuning_ratio;
}

SqueezeExtremes squeeze_minmax(double x, const DimensionlessModel& model)
{
    const WuvQuad t = wuv_quad(x, model);
    const real h = qhypot(t.u, t.v);
    const real lo = (t.w - h) / t.denom;
    const real hi = (t.w + h) / t.denom;
    return {static_cast<double>(lo), static_cast<double>(hi), static_cast<double>(lo * hi)};
}

double to_db(double s)
{
    if (!(s > 0.0)) {
        throw DomainError("dB conversion needs a positive PSD");
    }
    return 10.0 * std::log10(s);
}

SpectrumResult squeeze_spectrum(const DimensionlessModel& model, const HomodyneSetting& setting,
                                std::span<const double> grid)
{
    const bool per_frequency =
        setting.mode == HomodyneMode::OptimalPerFrequency && !(setting.x_c > 0.0);
    double fixed_theta = 0.0;
    switch (setting.mode) {
    case HomodyneMode::Fixed: fixed_theta = reduce_angle(setting.theta); break;
    case HomodyneMode::ExtremalA: fixed_theta = extremal_angles(setting.x_c, model).theta_1; break;
    case HomodyneMode::ExtremalPhi: fixed_theta = extremal_angles(setting.x_c, model).theta_2; break;
    case HomodyneMode::OptimalPerFrequency:
        if (!per_frequency) {
            const OptimalAngle opt = optimal_angle_at(setting.x_c, model);
            if (opt.indifferent) {
                throw AngleIndifferentError("x_c is a coherent point; every homodyne angle is optimal");
            }
            fixed_theta = opt.theta;
        }
        break;
    }

    SpectrumResult result;
    result.normalization = "single-sided, vacuum = 1";
    result.set_grid(grid, model.gamma0);
    auto& s_theta = result.add_channel("s_theta");
    auto& s_min = result.add_channel("s_min");
    auto& s_max = result.add_channel("s_max");
    auto& theta_opt = result.add_channel("theta_opt");
    auto& s_db = result.add_channel("s_db");
    auto& theta_used = result.add_channel("theta_used");
    for (std::size_t k = 0; k < result.x.size(); ++k) {
        const double x = result.x[k];
        const WuvQuad t = wuv_quad(x, model);
        const SqueezeExtremes ext = squeeze_minmax(x, model);
        theta_opt[k] = per_frequency_optimum(t);
        theta_used[k] = per_frequency ? theta_opt[k] : fixed_theta;
        s_theta[k] = per_frequency ? ext.s_min : output_quadrature_psd(x, theta_used[k], model);
        s_min[k] = ext.s_min;
        s_max[k] = ext.s_max;
        s_db[k] = to_db(s_theta[k]);
    }
    add_regime_warnings(result, model);
    return result;
}

} // namespace optospring
