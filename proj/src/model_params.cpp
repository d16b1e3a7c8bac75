#include "optospring/model_params.hpp"

#include "optospring/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace optospring {

namespace {

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

void require_positive(double value, const char* name)
{
    if (!positive_finite(value)) {
        std::ostringstream msg;
        msg << name << " must be positive and finite (got " << value << ")";
        throw DomainError(msg.str());
    }
}

double relative_gap(double a, double b)
{
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

} // namespace

double MsiGeometry::tau(const Constants& constants) const
{
    return round_trip_time.value_or(2.0 * cavity_length / constants.speed_of_light);
}

double MsiGeometry::wavenumber(const Constants& constants) const
{
    return pump_angular_frequency / constants.speed_of_light;
}

void MsiGeometry::validate() const
{
    require_positive(cavity_length, "cavity_length");
    require_positive(pump_angular_frequency, "pump_angular_frequency");
    if (!(mean_transmittance > 0.0) || !(mean_transmittance < kMaxMeanTransmittance)) {
        std::ostringstream msg;
        msg << "mean transmittance must lie in (0, " << kMaxMeanTransmittance << ") (got "
            << mean_transmittance << ")";
        throw DomainError(msg.str());
    }
    if (round_trip_time) {
        require_positive(*round_trip_time, "round_trip_time");
    }
    if (variant == MsiVariant::MovableMirror) {
        const double r = mirror_reflectivity;
        const double t = mirror_transmittance;
        if (!(r >= 0.0 && r <= 1.0) || !(t >= 0.0 && t <= 1.0)) {
            throw DomainError("mirror reflectivity and transmittance must lie in [0, 1]");
        }
        if (std::abs(r * r + t * t - 1.0) > 1e-12) {
            std::ostringstream msg;
            msg.precision(15);
            msg << "mirror amplitudes must satisfy r^2 + t^2 = 1 (got " << r * r + t * t << ")";
            throw DomainError(msg.str());
        }
    }
}

void PhysicalParams::validate() const
{
    require_positive(mass, "mass");
    require_positive(pump_angular_frequency, "pump_angular_frequency");
    require_positive(half_bandwidth, "half_bandwidth");
    require_positive(input_power, "input_power");
    if (!std::isfinite(dispersive_coeff) || !std::isfinite(dissipative_coeff)) {
        throw DomainError("coupling coefficients must be finite");
    }
}

double PhysicalParams::photon_flux(const Constants& constants) const
{
    return input_power / (constants.hbar * pump_angular_frequency);
}

PhysicalParams PhysicalParams::from_coupling(const CouplingCoefficients& coupling, double mass,
                                             double pump_angular_frequency, double input_power)
{
    PhysicalParams p;
    p.mass = mass;
    p.pump_angular_frequency = pump_angular_frequency;
    p.half_bandwidth = coupling.half_bandwidth;
    p.dispersive_coeff = coupling.dispersive_coeff;
    p.dissipative_coeff = coupling.dissipative_coeff;
    p.input_power = input_power;
    return p;
}

DimensionlessModel DimensionlessModel::from_ratio(double x0, double g, double gamma0,
                                                  double quality)
{
    require_positive(x0, "x0");
    require_positive(g, "coupling ratio g");
    // S_f(x0) at theta = 0 is p_m / 2 = x0^2 g; q_m D^2 = p_m / g^2.
    const double pm = 2.0 * x0 * x0 * g;
    DimensionlessModel m = from_pm_qmd2(pm, pm / (g * g), gamma0, quality);
    m.x0 = x0;
    m.coupling_ratio = g;
    m.delta_m = 2.0 * x0 * x0;
    return m;
}

DimensionlessModel DimensionlessModel::from_pm_qmd2(double p_m, double qm_d2, double gamma0,
                                                    double quality)
{
    if (!(p_m >= 0.0) || !(qm_d2 >= 0.0) || !std::isfinite(p_m) || !std::isfinite(qm_d2)) {
        throw DomainError("p_m and q_m D^2 must be finite and non-negative");
    }
    require_positive(gamma0, "gamma0");
    require_positive(quality, "quality");
    DimensionlessModel m;
    m.p_m = p_m;
    m.q_m = qm_d2 / (quality * quality);
    m.quality = quality;
    m.gamma0 = gamma0;
    m.delta_m = std::sqrt(p_m * qm_d2);
    m.x0 = std::sqrt(0.5 * m.delta_m);
    if (qm_d2 > 0.0) {
        m.coupling_ratio = std::sqrt(p_m / qm_d2);
    } else {
        m.coupling_ratio = p_m > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    }
    return m;
}

CouplingCoefficients derive_bs_coupling(const MsiGeometry& geometry, const Constants& constants)
{
    if (geometry.variant != MsiVariant::MovableBeamSplitter) {
        throw VariantMismatchError("derive_bs_coupling requires the movable beam splitter variant");
    }
    geometry.validate();
    const double t0 = geometry.mean_transmittance;
    const double k0 = geometry.wavenumber(constants);
    CouplingCoefficients c;
    c.half_bandwidth = t0 * t0 / geometry.tau(constants);
    c.dispersive_coeff = -1.0 / (kSqrt2 * geometry.cavity_length);
    c.dissipative_coeff = 2.0 * kSqrt2 * k0 / t0;
    return c;
}

CouplingCoefficients derive_mirror_coupling(const MsiGeometry& geometry,
                                            const Constants& constants)
{
    if (geometry.variant != MsiVariant::MovableMirror) {
        throw VariantMismatchError("derive_mirror_coupling requires the movable mirror variant");
    }
    geometry.validate();
    const double t1 = geometry.mean_transmittance;
    const double r = geometry.mirror_reflectivity;
    const double t = geometry.mirror_transmittance;
    const double k0 = geometry.wavenumber(constants);
    CouplingCoefficients c;
    c.half_bandwidth = r * r * t1 * t1 / geometry.tau(constants);
    c.dispersive_coeff = -t1 * t * r / geometry.cavity_length;
    c.dissipative_coeff = 4.0 * k0 / t1;
    return c;
}

MirrorRatioCheck mirror_ratio_check(const MsiGeometry& geometry, const Constants& constants)
{
    const CouplingCoefficients c = derive_mirror_coupling(geometry, constants);
    MirrorRatioCheck check;
    check.quoted = geometry.mirror_transmittance > 0.0
                       ? geometry.mirror_reflectivity / geometry.mirror_transmittance
                       : std::numeric_limits<double>::infinity();
    check.from_coefficients =
        c.dispersive_coeff != 0.0
            ? c.dissipative_coeff * c.half_bandwidth /
                  (2.0 * std::abs(c.dispersive_coeff) * geometry.pump_angular_frequency)
            : std::numeric_limits<double>::infinity();
    if (std::isinf(check.quoted) || std::isinf(check.from_coefficients)) {
        check.consistent = std::isinf(check.quoted) && std::isinf(check.from_coefficients);
    } else {
        check.consistent = relative_gap(check.quoted, check.from_coefficients) <= 0.1;
    }
    return check;
}

double intracavity_power(double wavenumber, double displacement, const MsiGeometry& geometry,
                         double input_power, const Constants& constants)
{
    if (geometry.variant != MsiVariant::MovableBeamSplitter) {
        throw VariantMismatchError("intracavity_power models the movable beam splitter variant");
    }
    geometry.validate();
    require_positive(wavenumber, "wavenumber");
    const double k0 = geometry.wavenumber(constants);
    // 2 k z0 is fixed by T0 at the pump wavenumber and scales with k.
    const double mirror_phase =
        (wavenumber / k0) * std::asin(geometry.mean_transmittance) + kSqrt2 * wavenumber * displacement;
    const double r = std::cos(mirror_phase);
    const double t = std::sin(mirror_phase);
    if (!(r > 0.0 && r < 1.0)) {
        throw DomainError("generalized mirror reflectivity left (0, 1)");
    }
    const double round_trip =
        kPi + 2.0 * (wavenumber - k0) * geometry.cavity_length + kSqrt2 * wavenumber * displacement;
    return t * t * input_power / (1.0 + r * r + 2.0 * r * std::cos(round_trip));
}

ResonanceBandwidth resonance_and_bandwidth(const MsiGeometry& geometry, double displacement,
                                           const Constants& constants)
{
    if (geometry.variant != MsiVariant::MovableBeamSplitter) {
        throw VariantMismatchError("resonance_and_bandwidth models the movable beam splitter variant");
    }
    geometry.validate();
    const double t0 = geometry.mean_transmittance;
    const double r0 = std::sqrt(1.0 - t0 * t0);
    const double k0 = geometry.wavenumber(constants);
    ResonanceBandwidth rb;
    rb.resonance =
        geometry.pump_angular_frequency * (1.0 - displacement / (kSqrt2 * geometry.cavity_length));
    rb.bandwidth = t0 * t0 / geometry.tau(constants) *
                   (1.0 + 2.0 * kSqrt2 * k0 * r0 * displacement / t0);
    return rb;
}

DimensionlessModel reduce(const PhysicalParams& params, const Constants& constants)
{
    params.validate();
    const double xi = params.dispersive_coeff;
    const double eta = params.dissipative_coeff;
    if (xi == 0.0 && eta == 0.0) {
        throw DegenerateModelError("xi and eta are both zero: no optomechanical coupling");
    }
    const double hbar = constants.hbar;
    const double m = params.mass;
    const double w0 = params.pump_angular_frequency;
    const double gamma0 = params.half_bandwidth;
    const double flux = params.photon_flux(constants);

    DimensionlessModel model;
    model.photon_flux = flux;
    model.gamma0 = gamma0;
    model.quality = w0 / gamma0;
    model.p_m = 8.0 * hbar * eta * eta * flux / (m * gamma0 * gamma0);
    model.q_m = 32.0 * hbar * xi * xi * flux / (m * gamma0 * gamma0);

    if (xi == 0.0) {
        model.coupling_ratio = std::numeric_limits<double>::infinity();
    } else {
        model.coupling_ratio = std::sqrt(model.p_m / model.qm_d2());
    }

    const double kappa = -8.0 * hbar * w0 * xi * eta * flux / gamma0;
    const double delta = 16.0 * hbar * w0 * xi * eta * flux / (gamma0 * gamma0);
    model.imaginary_spring = kappa < 0.0;
    model.x0 = std::sqrt(std::abs(kappa) / m) / gamma0;
    model.delta_m = std::abs(delta) / (m * gamma0);

    const double via_couplings = model.quality * std::sqrt(model.p_m * model.q_m);
    const double via_spring = 2.0 * model.x0 * model.x0;
    if (relative_gap(model.delta_m, via_couplings) > 1e-12 ||
        relative_gap(model.delta_m, via_spring) > 1e-12) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "viscosity identities violated: delta_m=" << model.delta_m
            << " D*sqrt(PmQm)=" << via_couplings << " 2x0^2=" << via_spring;
        throw InvariantError(msg.str());
    }
    return model;
}

MsiGeometry lab_geometry()
{
    MsiGeometry g;
    g.variant = MsiVariant::MovableBeamSplitter;
    g.cavity_length = 1.0;
    g.pump_angular_frequency = 2.0 * kPi * 3e14;
    g.mean_transmittance = 0.01;
    return g;
}

PhysicalParams lab_params(const Constants& constants)
{
    const MsiGeometry geometry = lab_geometry();
    return PhysicalParams::from_coupling(derive_bs_coupling(geometry, constants), 0.05,
                                         geometry.pump_angular_frequency, 0.042);
}

} // namespace optospring
