#include "optospring/errors.hpp"
#include "optospring/model_params.hpp"
#include "optospring/rigidity.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace optospring;

TEST_CASE("laboratory set reproduces the tabulated coupling values")
{
    const CouplingCoefficients c = derive_bs_coupling(lab_geometry());
    CHECK(rel_err(c.half_bandwidth, 15000.0) < 0.01);
    CHECK(rel_err(c.dispersive_coeff, -0.71) < 0.01);
    CHECK(rel_err(c.dissipative_coeff, 1.78e9) < 0.01);

    CHECK(rel_err(c.half_bandwidth, 14989.6229) < 1e-12);
    CHECK(rel_err(c.dispersive_coeff, -0.70710678118654752) < 1e-12);
    CHECK(rel_err(c.dissipative_coeff, 1778383472.8057233) < 1e-12);
}

TEST_CASE("reduction of the laboratory set")
{
    const PhysicalParams p = lab_params();
    const DimensionlessModel m = reduce(p);
    CHECK(rel_err(p.photon_flux(), 2.1128662527936063e17) < 1e-12);
    CHECK(rel_err(m.p_m, 5.0180797923682946e-5) < 1e-12);
    CHECK(rel_err(m.qm_d2(), 0.50180797923682946) < 1e-12);
    CHECK(rel_err(m.quality, 1.2575070131710091e11) < 1e-12);
    CHECK(rel_err(m.coupling_ratio, 0.01) < 1e-12);
    CHECK(rel_err(m.x0, 0.050090317389532953) < 1e-12);
    CHECK(std::abs(m.x0 / 0.05 - 1.0) < 0.02);
    CHECK(rel_err(m.delta_m, 2.0 * m.x0 * m.x0) < 1e-12);
    CHECK(rel_err(m.delta_m, m.quality * std::sqrt(m.p_m * m.q_m)) < 1e-12);
    CHECK_FALSE(m.imaginary_spring);
    CHECK_FALSE(m.outside_small_frequency_regime());
}

TEST_CASE("coupling ratio equals the beam-splitter transmittance")
{
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> t0(1e-3, 0.29);
    std::uniform_real_distribution<double> length(0.05, 20.0);
    std::uniform_real_distribution<double> freq(50.0, 1500.0);
    std::uniform_real_distribution<double> mass(1e-3, 10.0);
    std::uniform_real_distribution<double> power(1e-3, 10.0);
    for (int i = 0; i < 1000; ++i) {
        MsiGeometry g;
        g.mean_transmittance = t0(rng);
        g.cavity_length = length(rng);
        g.pump_angular_frequency = 2.0 * kPi * freq(rng) * 1e12;
        const PhysicalParams p = PhysicalParams::from_coupling(
            derive_bs_coupling(g), mass(rng), g.pump_angular_frequency, power(rng));
        const DimensionlessModel m = reduce(p);
        REQUIRE(std::abs(m.coupling_ratio / g.mean_transmittance - 1.0) <= 1e-9);
    }
}

TEST_CASE("movable mirror variant")
{
    MsiGeometry g;
    g.variant = MsiVariant::MovableMirror;
    g.cavity_length = 1.0;
    g.pump_angular_frequency = 2.0 * kPi * 3e14;
    g.mean_transmittance = 0.01;
    g.mirror_reflectivity = 3.0 / std::sqrt(10.0);
    g.mirror_transmittance = 1.0 / std::sqrt(10.0);

    const CouplingCoefficients c = derive_mirror_coupling(g);
    const double r = g.mirror_reflectivity;
    CHECK(rel_err(c.half_bandwidth, r * r * 1e-4 / g.tau()) < 1e-12);
    CHECK(c.dispersive_coeff < 0.0);

    const MirrorRatioCheck check = mirror_ratio_check(g);
    CHECK(rel_err(check.from_coefficients, 3.0) < 1e-12);
    CHECK(check.consistent);

    SUBCASE("ratio holds only for tau = 2L/c")
    {
        g.round_trip_time = 2.0 * g.tau();
        const MirrorRatioCheck off = mirror_ratio_check(g);
        CHECK(rel_err(off.from_coefficients, 1.5) < 1e-12);
        CHECK_FALSE(off.consistent);
    }
    SUBCASE("rounded amplitudes violate unitarity")
    {
        g.mirror_reflectivity = 0.9487;
        g.mirror_transmittance = 0.3162;
        CHECK_THROWS_AS(derive_mirror_coupling(g), DomainError);
    }
    SUBCASE("variant mismatch")
    {
        CHECK_THROWS_AS(derive_bs_coupling(g), VariantMismatchError);
        CHECK_THROWS_AS(intracavity_power(g.wavenumber(), 0.0, g, 1.0), VariantMismatchError);
    }
}

TEST_CASE("geometry validation")
{
    MsiGeometry g = lab_geometry();
    g.mean_transmittance = 0.5;
    CHECK_THROWS_AS(derive_bs_coupling(g), DomainError);
    g.mean_transmittance = 0.0;
    CHECK_THROWS_AS(derive_bs_coupling(g), DomainError);
    g = lab_geometry();
    g.cavity_length = -1.0;
    CHECK_THROWS_AS(derive_bs_coupling(g), DomainError);
    CHECK_THROWS_AS(derive_mirror_coupling(lab_geometry()), VariantMismatchError);
}

TEST_CASE("degenerate and pure couplings")
{
    PhysicalParams p = lab_params();
    p.dispersive_coeff = 0.0;
    p.dissipative_coeff = 0.0;
    CHECK_THROWS_AS(reduce(p), DegenerateModelError);

    p = lab_params();
    p.dispersive_coeff = 0.0;
    DimensionlessModel m = reduce(p);
    CHECK(std::isinf(m.coupling_ratio));
    CHECK(m.x0 == 0.0);
    CHECK(m.q_m == 0.0);

    p = lab_params();
    p.dissipative_coeff = 0.0;
    m = reduce(p);
    CHECK(m.coupling_ratio == 0.0);
    CHECK(m.x0 == 0.0);

    p = lab_params();
    p.dispersive_coeff = -p.dispersive_coeff;
    m = reduce(p);
    CHECK(m.imaginary_spring);
    CHECK(rel_err(m.x0, 0.050090317389532953) < 1e-12);
}

TEST_CASE("intracavity power resonance")
{
    const MsiGeometry g = lab_geometry();
    const double k0 = g.wavenumber();
    const double t0 = g.mean_transmittance;
    const double r0 = std::sqrt(1.0 - t0 * t0);
    const double peak = intracavity_power(k0, 0.0, g, 1.0);
    // Round-trip phase ~1e7 rad leaves ~1e-9 of phase jitter.
    CHECK(rel_err(peak, t0 * t0 / ((1.0 - r0) * (1.0 - r0))) < 1e-7);
    CHECK(rel_err(peak, 4.0 / (t0 * t0)) < 1e-3);

    // Energy decays at gamma0, so power halves at a detuning of gamma0 / 2.
    const double gamma0 = derive_bs_coupling(g).half_bandwidth;
    const double dk = 0.5 * gamma0 / kCodata.speed_of_light;
    CHECK(std::abs(intracavity_power(k0 + dk, 0.0, g, 1.0) / peak - 0.5) < 1e-3);
    CHECK(std::abs(intracavity_power(k0 - dk, 0.0, g, 1.0) / peak - 0.5) < 1e-3);

    const double off = intracavity_power(k0 + 10.0 * dk, 0.0, g, 1.0) / peak;
    CHECK(off < 0.02);
}

TEST_CASE("resonance and bandwidth respond linearly to displacement")
{
    const MsiGeometry g = lab_geometry();
    const CouplingCoefficients c = derive_bs_coupling(g);
    const double y = 1e-13;
    const ResonanceBandwidth zero = resonance_and_bandwidth(g, 0.0);
    const ResonanceBandwidth moved = resonance_and_bandwidth(g, y);
    CHECK(rel_err(zero.bandwidth, c.half_bandwidth) < 1e-15);
    CHECK(rel_err(zero.resonance, g.pump_angular_frequency) < 1e-15);

    const double r0 = std::sqrt(1.0 - g.mean_transmittance * g.mean_transmittance);
    const double slope_gamma = (moved.bandwidth - zero.bandwidth) / y;
    CHECK(rel_err(slope_gamma, c.half_bandwidth * c.dissipative_coeff * r0) < 1e-6);
    // eta omits R0 = sqrt(1 - T0^2); the two agree to order T0^2.
    CHECK(rel_err(slope_gamma, c.half_bandwidth * c.dissipative_coeff) < 0.6e-4);

    const double shift = resonance_and_bandwidth(g, 1e-9).resonance - zero.resonance;
    CHECK(rel_err(shift / 1e-9, g.pump_angular_frequency * c.dispersive_coeff) < 1e-5);
}

TEST_CASE("spring scales with input power")
{
    PhysicalParams p = lab_params();
    const SpringConstants base = spring_constants(p);
    const DimensionlessModel m = reduce(p);
    p.input_power *= 4.0;
    const SpringConstants strong = spring_constants(p);
    CHECK(rel_err(strong.kappa, 4.0 * base.kappa) < 1e-12);
    CHECK(rel_err(*strong.omega0_mech, 2.0 * *base.omega0_mech) < 1e-12);
    CHECK(rel_err(reduce(p).x0, 2.0 * m.x0) < 1e-12);
}

TEST_CASE("dimensionless constructors")
{
    const DimensionlessModel m = DimensionlessModel::from_ratio(0.05, 20.0);
    CHECK(m.x0 == 0.05);
    CHECK(m.coupling_ratio == 20.0);
    CHECK(rel_err(m.p_m, 2.0 * 0.0025 * 20.0) < 1e-15);
    CHECK(rel_err(m.qm_d2(), 2.0 * 0.0025 / 20.0) < 1e-12);
    CHECK_THROWS_AS(DimensionlessModel::from_ratio(0.0, 1.0), DomainError);
    CHECK_THROWS_AS(DimensionlessModel::from_ratio(0.05, -1.0), DomainError);

    const DimensionlessModel dissipative = DimensionlessModel::from_pm_qmd2(1.0, 0.0);
    CHECK(std::isinf(dissipative.coupling_ratio));
    CHECK(dissipative.x0 == 0.0);
    const DimensionlessModel none = DimensionlessModel::from_pm_qmd2(0.0, 0.0);
    CHECK(none.coupling_ratio == 0.0);
}
