#include "optospring/rigidity.hpp"

#include "optospring/errors.hpp"

#include <cmath>
#include <sstream>

namespace optospring {

namespace {

// -8 hbar w0 xi eta A^2 / gamma0, the static stiffness.
double static_stiffness(const PhysicalParams& p, const Constants& constants)
{
    return -8.0 * constants.hbar * p.pump_angular_frequency * p.dispersive_coeff *
           p.dissipative_coeff * p.photon_flux(constants) / p.half_bandwidth;
}

} // namespace

std::string_view to_string(StabilityClass c)
{
    switch (c) {
    case StabilityClass::UnstableSpring: return "UnstableSpring";
    case StabilityClass::UnstableAntiSpring: return "UnstableAntiSpring";
    case StabilityClass::NoSpring: return "NoSpring";
    }
    return "?";
}

std::complex<double> optical_rigidity(double omega, const PhysicalParams& params,
                                      const Constants& constants)
{
    params.validate();
    const double numerator = -4.0 * constants.hbar * params.pump_angular_frequency *
                             params.dispersive_coeff * params.dissipative_coeff *
                             params.photon_flux(constants);
    return numerator / std::complex<double>(0.5 * params.half_bandwidth, -omega);
}

SpringConstants spring_constants(const PhysicalParams& params, const Constants& constants)
{
    params.validate();
    SpringConstants s;
    s.kappa = static_stiffness(params, constants) + 0.0;  // no negative zero
    s.delta = -2.0 * s.kappa / params.half_bandwidth + 0.0;
    if (s.kappa >= 0.0) {
        s.omega0_mech = std::sqrt(s.kappa / params.mass);
    }
    return s;
}

StabilityClass stability_class(const PhysicalParams& params)
{
    const double product = params.dispersive_coeff * params.dissipative_coeff;
    if (product == 0.0) {
        return StabilityClass::NoSpring;
    }
    return product < 0.0 ? StabilityClass::UnstableSpring : StabilityClass::UnstableAntiSpring;
}

StabilityClass stability_class(const DimensionlessModel& model)
{
    if (model.x0 == 0.0) {
        return StabilityClass::NoSpring;
    }
    return model.imaginary_spring ? StabilityClass::UnstableAntiSpring
                                  : StabilityClass::UnstableSpring;
}

std::complex<double> effective_susceptibility(double omega, const PhysicalParams& params,
                                              double gamma_m, RigidityForm form,
                                              const Constants& constants)
{
    if (!(gamma_m >= 0.0)) {
        throw DomainError("intrinsic damping gamma_m must be non-negative");
    }
    std::complex<double> stiffness;
    if (form == RigidityForm::Exact) {
        stiffness = optical_rigidity(omega, params, constants);
    } else {
        const SpringConstants s = spring_constants(params, constants);
        stiffness = {s.kappa, -omega * s.delta};
    }
    const double m = params.mass;
    const std::complex<double> denominator =
        stiffness - m * omega * omega - std::complex<double>(0.0, omega * m * gamma_m);
    if (std::abs(denominator) < 1e-300) {
        std::ostringstream msg;
        msg << "susceptibility pole at omega = " << omega << " rad/s";
        throw SingularityError(msg.str());
    }
    return 1.0 / denominator;
}

std::complex<double> normalized_inverse_susceptibility(double x, const DimensionlessModel& model,
                                                       double damping)
{
    const double spring = (model.imaginary_spring ? -1.0 : 1.0) * model.x0 * model.x0;
    return spring / std::complex<double>(1.0, -2.0 * x) - x * x -
           std::complex<double>(0.0, x * damping);
}

} // namespace optospring
