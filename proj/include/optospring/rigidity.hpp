#pragma once

#include "optospring/constants.hpp"
#include "optospring/model_params.hpp"

#include <complex>
#include <optional>
#include <string_view>

namespace optospring {

/// Spring/viscosity decomposition of the optical rigidity, K ~ kappa - i Omega delta.
/// kappa and delta always carry opposite signs: a restoring spring comes with
/// negative viscosity and vice versa.
struct SpringConstants {
    double kappa = 0.0;                 // N/m
    double delta = 0.0;                 // N s/m, signed
    std::optional<double> omega0_mech;  // sqrt(kappa/m), rad/s; empty when kappa < 0
};

enum class StabilityClass {
    UnstableSpring,      // kappa > 0, antidamping
    UnstableAntiSpring,  // kappa < 0, damped
    NoSpring,            // xi * eta = 0
};

std::string_view to_string(StabilityClass c);

enum class RigidityForm {
    Exact,   // -4 hbar w0 xi eta A^2 / (gamma0/2 - i Omega)
    Taylor,  // kappa - i Omega delta
};

// Complex optical stiffness at angular frequency omega (N/m).
std::complex<double> optical_rigidity(double omega, const PhysicalParams& params,
                                      const Constants& constants = kCodata);

SpringConstants spring_constants(const PhysicalParams& params,
                                 const Constants& constants = kCodata);

StabilityClass stability_class(const PhysicalParams& params);
StabilityClass stability_class(const DimensionlessModel& model);

/// Mechanical susceptibility y/F in m/N including the optical rigidity and an
/// optional intrinsic viscous damping rate gamma_m (1/s). gamma_m = 0 gives
/// the bare optomechanical response. Throws SingularityError on a pole.
std::complex<double> effective_susceptibility(double omega, const PhysicalParams& params,
                                              double gamma_m,
                                              RigidityForm form = RigidityForm::Exact,
                                              const Constants& constants = kCodata);

/// 1 / (m gamma0^2 chi) in reduced units: x0^2 / (1 - 2ix) - x^2 - i x damping,
/// where damping = gamma_m / gamma0. The spring term is negated for an
/// anti-spring.
std::complex<double> normalized_inverse_susceptibility(double x, const DimensionlessModel& model,
                                                       double damping);

} // namespace optospring
