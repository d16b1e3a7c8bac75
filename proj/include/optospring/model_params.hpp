#pragma once

#include "optospring/constants.hpp"

#include <optional>

namespace optospring {

enum class MsiVariant {
    MovableBeamSplitter,  // test mass is the 50/50 beam splitter
    MovableMirror,        // test mass is the partially transmitting mirror M
};

/// Michelson-Sagnac interferometer used as the input (generalized) mirror of
/// a Fabry-Perot cavity. The static arm offsets only enter through the mean
/// amplitude transmittance, so they are not stored.
struct MsiGeometry {
    MsiVariant variant = MsiVariant::MovableBeamSplitter;
    double cavity_length = 1.0;            // m, beam splitter to end mirror
    double pump_angular_frequency = 0.0;   // rad/s
    double mean_transmittance = 0.01;      // T0 (beam splitter) or T1 = sin 2kz0 (mirror)
    double mirror_reflectivity = 1.0;      // r_M, MovableMirror only
    double mirror_transmittance = 0.0;     // t_M, MovableMirror only
    std::optional<double> round_trip_time; // s; 2L/c when absent

    double tau(const Constants& constants = kCodata) const;
    double wavenumber(const Constants& constants = kCodata) const;

    // Throws DomainError when a field is out of range.
    void validate() const;
};

// Largest mean transmittance accepted; the coupling formulas assume T0 << 1.
inline constexpr double kMaxMeanTransmittance = 0.3;

struct CouplingCoefficients {
    double half_bandwidth = 0.0;     // gamma0, 1/s
    double dispersive_coeff = 0.0;   // xi, 1/m
    double dissipative_coeff = 0.0;  // eta, 1/m
};

/// Dimensional description of cavity, mechanics and pump.
struct PhysicalParams {
    double mass = 0.0;                    // kg
    double pump_angular_frequency = 0.0;  // rad/s
    double half_bandwidth = 0.0;          // gamma0, 1/s
    double dispersive_coeff = 0.0;        // xi, 1/m
    double dissipative_coeff = 0.0;       // eta, 1/m
    double input_power = 0.0;             // W

    void validate() const;

    // Mean input photon flux A^2 = I0 / (hbar w0), 1/s.
    double photon_flux(const Constants& constants = kCodata) const;

    static PhysicalParams from_coupling(const CouplingCoefficients& coupling, double mass,
                                        double pump_angular_frequency, double input_power);
};

/// Reduced parameter set on which every spectrum is a pure function.
///
/// Only the pair (p_m, q_m * quality^2) matters for the spectra; quality and
/// gamma0 are carried to split q_m and to re-dimensionalize frequency axes.
/// x0 is the magnitude of the spring resonance; imaginary_spring marks an
/// anti-spring (xi * eta > 0), for which the spectra are undefined.
struct DimensionlessModel {
    double p_m = 0.0;
    double q_m = 0.0;
    double quality = 1.0;        // D = w0 / gamma0
    double coupling_ratio = 0.0; // g = sqrt(p_m / (q_m D^2)); +inf when q_m = 0
    double x0 = 0.0;             // Omega0 / gamma0
    double delta_m = 0.0;        // viscosity magnitude, = 2 x0^2
    double photon_flux = 0.0;    // A^2, 1/s (0 when unknown)
    double gamma0 = 1.0;         // 1/s
    bool imaginary_spring = false;

    double qm_d2() const { return q_m * quality * quality; }
    bool outside_small_frequency_regime() const { return x0 >= kSmallFrequencyLimit; }

    // Model with resonance x0 and coupling ratio g, 0 < g < inf.
    static DimensionlessModel from_ratio(double x0, double g, double gamma0 = 1.5e4,
                                         double quality = 1.2575e11);

    // Model from the two independent couplings; covers the pure-coupling
    // limits (either argument zero) and the uncoupled cavity (both zero).
    static DimensionlessModel from_pm_qmd2(double p_m, double qm_d2, double gamma0 = 1.5e4,
                                           double quality = 1.2575e11);
};

// Coupling coefficients of the movable-beam-splitter interferometer.
CouplingCoefficients derive_bs_coupling(const MsiGeometry& geometry,
                                        const Constants& constants = kCodata);

// Coupling coefficients of the movable-mirror interferometer.
CouplingCoefficients derive_mirror_coupling(const MsiGeometry& geometry,
                                            const Constants& constants = kCodata);

struct MirrorRatioCheck {
    double from_coefficients = 0.0;  // g evaluated from (gamma1, xi1, eta1)
    double quoted = 0.0;             // r_M / t_M
    bool consistent = true;          // agree within 10 %
};

// Compares g from the mirror-variant coefficients with r_M / t_M. The two
// coincide only when the round trip time is 2L/c.
MirrorRatioCheck mirror_ratio_check(const MsiGeometry& geometry,
                                    const Constants& constants = kCodata);

/// Power stored in the cavity for wavenumber k and beam-splitter
/// displacement y. The static round-trip phase is taken resonant at the pump
/// wavenumber, so only the offset (k - k0) 2L enters.
double intracavity_power(double wavenumber, double displacement, const MsiGeometry& geometry,
                         double input_power, const Constants& constants = kCodata);

struct ResonanceBandwidth {
    double resonance = 0.0;  // omega_r, rad/s
    double bandwidth = 0.0;  // gamma, 1/s
};

// First-order resonance shift and relaxation rate for displacement y.
ResonanceBandwidth resonance_and_bandwidth(const MsiGeometry& geometry, double displacement,
                                           const Constants& constants = kCodata);

DimensionlessModel reduce(const PhysicalParams& params, const Constants& constants = kCodata);

// Laboratory parameter set: T0 = 0.01, m = 50 g, 300 THz, 42 mW, L = 1 m.
MsiGeometry lab_geometry();
PhysicalParams lab_params(const Constants& constants = kCodata);

} // namespace optospring
