#include "optospring/validate.hpp"

#include "optospring/errors.hpp"
#include "optospring/force_sensing.hpp"
#include "optospring/langevin_oracle.hpp"
#include "optospring/model_params.hpp"
#include "optospring/rigidity.hpp"
#include "optospring/squeezing.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

namespace optospring {

namespace {

double rel(double a, double b)
{
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

std::string sci(double v)
{
    std::ostringstream s;
    s.precision(3);
    s << std::scientific << v;
    return s.str();
}

// Worst relative deviation seen by a check, with the offending case.
struct Worst {
    double value = 0.0;
    std::string where;

    void update(double v, const std::string& w)
    {
        if (!(v <= value)) {  // NaN wins
            value = v;
            where = w;
        }
    }
};

CheckResult bounded(std::string name, const Worst& worst, double limit)
{
    CheckResult r;
    r.name = std::move(name);
    r.passed = worst.value <= limit;
    r.detail = "max deviation " + sci(worst.value) + " (limit " + sci(limit) + ")";
    if (!r.passed && !worst.where.empty()) {
        r.detail += " at " + worst.where;
    }
    return r;
}

DimensionlessModel random_model(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> x0(0.02, 0.3);
    std::uniform_real_distribution<double> log_g(std::log(0.2), std::log(2000.0));
    return DimensionlessModel::from_ratio(x0(rng), std::exp(log_g(rng)));
}

CheckResult lab_golden(const Constants& constants)
{
    const PhysicalParams p = lab_params(constants);
    const DimensionlessModel m = reduce(p, constants);
    const SpringConstants s = spring_constants(p, constants);
    const std::pair<const char*, std::pair<double, double>> values[] = {
        {"gamma0", {p.half_bandwidth, 14989.6229}},
        {"xi", {p.dispersive_coeff, -0.70710678118654752}},
        {"eta", {p.dissipative_coeff, 1778383472.8057233}},
        {"photon_flux", {p.photon_flux(constants), 2.1128662527936063e17}},
        {"p_m", {m.p_m, 5.0180797923682946e-5}},
        {"qm_d2", {m.qm_d2(), 0.50180797923682946}},
        {"g", {m.coupling_ratio, 0.01}},
        {"x0", {m.x0, 0.050090317389532953}},
        {"kappa", {s.kappa, 28187.657504409871}},
        {"delta", {s.delta, -3.7609561884855517}},
    };
    Worst worst;
    for (const auto& [name, pair] : values) {
        worst.update(rel(pair.first, pair.second), name);
    }
    return bounded("lab_golden_values", worst, 1e-9);
}

CheckResult ratio_identity(const Constants& constants)
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> t0(1e-3, 0.29);
    std::uniform_real_distribution<double> length(0.1, 10.0);
    std::uniform_real_distribution<double> freq(100.0, 1000.0);
    Worst worst;
    for (int i = 0; i < 200; ++i) {
        MsiGeometry g;
        g.mean_transmittance = t0(rng);
        g.cavity_length = length(rng);
        g.pump_angular_frequency = 2.0 * kPi * freq(rng) * 1e12;
        const PhysicalParams p =
            PhysicalParams::from_coupling(derive_bs_coupling(g, constants), 0.05,
                                          g.pump_angular_frequency, 0.042);
        const DimensionlessModel m = reduce(p, constants);
        worst.update(std::abs(m.coupling_ratio / g.mean_transmittance - 1.0),
                     "T0 = " + sci(g.mean_transmittance));
    }
    return bounded("ratio_g_equals_t0", worst, 1e-9);
}

CheckResult mirror_ratio(const Constants& constants)
{
    MsiGeometry g;
    g.variant = MsiVariant::MovableMirror;
    g.cavity_length = 1.0;
    g.pump_angular_frequency = 2.0 * kPi * 3e14;
    g.mean_transmittance = 0.01;
    g.mirror_reflectivity = 3.0 / std::sqrt(10.0);
    g.mirror_transmittance = 1.0 / std::sqrt(10.0);
    const MirrorRatioCheck c = mirror_ratio_check(g, constants);
    Worst worst;
    worst.update(rel(c.from_coefficients, 3.0), "r/t = 3");
    return bounded("mirror_ratio_r_over_t", worst, 1e-9);
}

CheckResult resonance_identities()
{
    std::mt19937_64 rng(12);
    Worst worst;
    for (int i = 0; i < 200; ++i) {
        const DimensionlessModel m = random_model(rng);
        const double amp = force_noise_psd(m.x0, 0.0, m).s_f;
        const double phase = force_noise_psd(m.x0, kHalfPi, m).s_f;
        const std::string where = "x0 = " + sci(m.x0) + ", g = " + sci(m.coupling_ratio);
        worst.update(rel(amp, 0.5 * m.p_m), where);
        worst.update(rel(amp, m.x0 * m.x0 * m.coupling_ratio), where);
        worst.update(rel(phase, 1.0 / m.coupling_ratio), where);
        worst.update(rel(amp * phase, m.x0 * m.x0), where);
    }
    return bounded("resonance_sensitivity_identities", worst, 1e-12);
}

CheckResult decomposition_periodicity()
{
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Worst worst;
    for (int i = 0; i < 500; ++i) {
        const DimensionlessModel m = random_model(rng);
        const double x = m.x0 * std::exp(std::log(30.0) * (2.0 * unit(rng) - 1.0));
        const double theta = kPi * unit(rng);
        const ForceNoise a = force_noise_psd(x, theta, m);
        const ForceNoise b = force_noise_psd(x, theta + kPi, m);
        worst.update(rel(a.s_f, a.s_a1 + a.s_phi1), "decomposition");
        worst.update(rel(a.s_f, b.s_f), "pi shift");
        worst.update(rel(force_noise_psd(x, 0.0, m).s_f, force_noise_amplitude_readout(x, m)),
                     "theta = 0 closed form");
        worst.update(rel(force_noise_psd(x, kHalfPi, m).s_f, force_noise_phase_readout(x, m)),
                     "theta = pi/2 closed form");
    }
    return bounded("force_psd_decomposition_and_periodicity", worst, 1e-12);
}

CheckResult extremal_angle_zeros()
{
    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> unit(0.2, 5.0);
    Worst worst;
    for (int i = 0; i < 200; ++i) {
        const DimensionlessModel m = random_model(rng);
        const double x_c = m.x0 * unit(rng);
        const ExtremalAngles e = extremal_angles(x_c, m);
        const ForceNoise n1 = force_noise_psd(x_c, e.theta_1, m);
        const ForceNoise n2 = force_noise_psd(x_c, e.theta_2, m);
        worst.update(n1.s_a1 / n1.s_f, "S_a1 at theta_1");
        worst.update(n2.s_phi1 / n2.s_f, "S_phi1 at theta_2");
    }
    return bounded("extremal_angles_cancel_quadrature", worst, 1e-12);
}

CheckResult minimum_uncertainty()
{
    std::mt19937_64 rng(15);
    Worst worst;
    for (int i = 0; i < 50; ++i) {
        const DimensionlessModel m = random_model(rng);
        for (double x : log_grid(m.x0 / 30.0, 30.0 * m.x0, 200)) {
            const SqueezeExtremes e = squeeze_minmax(x, m);
            worst.update(std::abs(e.product - 1.0), "x = " + sci(x));
            worst.update(std::abs(uncertainty_residual(x, m)), "W^2 - U^2 - V^2 at x = " + sci(x));
        }
    }
    return bounded("minimum_uncertainty_product", worst, 1e-9);
}

CheckResult squeezing_limits()
{
    const DimensionlessModel m = DimensionlessModel::from_ratio(0.05, 0.2);
    const double x = 1e-3 * m.x0;
    Worst worst;
    worst.update(rel(output_quadrature_psd(x, optimal_angle_at(x, m).theta, m), low_freq_limit(0.2)),
                 "low-frequency limit g = 0.2");
    const DimensionlessModel coherent = DimensionlessModel::from_ratio(0.05, 20.0);
    for (double theta : {0.0, 0.3, kHalfPi, 2.5}) {
        worst.update(std::abs(output_quadrature_psd(coherent.x0, theta, coherent) - 1.0),
                     "coherent point theta = " + sci(theta));
    }
    return bounded("squeezing_limits", worst, 1e-3);
}

CheckResult sql_band()
{
    const DimensionlessModel m = DimensionlessModel::from_ratio(0.05, 20.0);
    const std::vector<double> grid = log_grid(0.005, 0.5, 2000);
    const std::vector<Interval> band = sql_crossings(m, 0.0, grid);
    CheckResult r;
    r.name = "sql_band_g20";
    if (band.size() != 1) {
        r.detail = "expected one sub-SQL interval, found " + std::to_string(band.size());
        return r;
    }
    Worst worst;
    worst.update(rel(band[0].lo, 0.041726257596162079), "lower edge");
    worst.update(rel(band[0].hi, 0.066571457346159742), "upper edge");
    return bounded(r.name, worst, 1e-9);
}

CheckResult bandwidth()
{
    Worst worst;
    for (double g : {0.01, 20.0}) {
        const DimensionlessModel m = DimensionlessModel::from_ratio(0.05, g);
        const DetectionBandwidth bw = detection_bandwidth(m, 0.0);
        worst.update(std::abs(std::log2(bw.ratio / bw.s_min)), "g = " + sci(g));
    }
    return bounded("detection_bandwidth_log2_ratio", worst, 1.0);
}

CheckResult oracle_harmonic()
{
    const DimensionlessModel m = DimensionlessModel::from_ratio(0.02, 0.2);
    OracleConfig c;
    c.duration = 40000.0;
    c.gamma_m_rel = 0.1;
    const HarmonicTransfer h = harmonic_transfer_check(m, 0.5 * m.x0, kHalfPi, c);
    Worst worst;
    worst.update(h.relative_error, "x = x0/2");
    return bounded("oracle_harmonic_transfer", worst, 1e-2);
}

CheckResult oracle_vacuum()
{
    const DimensionlessModel m = DimensionlessModel::from_pm_qmd2(0.0, 0.0);
    OracleConfig c;
    c.duration = 2000.0;
    c.segments = 64;
    c.seed = 99;
    const SpectrumResult r = simulate_output_psd(m, c, 0.7, 0.05, 1.0);
    const auto& s = r.channel("s_theta");
    const auto& se = r.channel("stderr_s_theta");
    std::size_t inside = 0;
    for (std::size_t k = 0; k < s.size(); ++k) {
        inside += std::abs(s[k] - 1.0) <= 3.0 * se[k] ? 1 : 0;
    }
    const double fraction = static_cast<double>(inside) / static_cast<double>(s.size());
    CheckResult out;
    out.name = "oracle_vacuum_calibration";
    out.passed = fraction >= 0.97;
    out.detail = "fraction of bins within 3 standard errors " + sci(fraction) + " (limit 9.7e-01)";
    return out;
}

} // namespace

bool ValidationReport::passed() const
{
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

std::string ValidationReport::format() const
{
    std::ostringstream out;
    std::size_t ok = 0;
    for (const auto& c : checks) {
        out << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
        ok += c.passed ? 1 : 0;
    }
    out << ok << "/" << checks.size() << " checks passed\n";
    return out.str();
}

ValidationReport run_validation(const Constants& constants)
{
    const std::pair<const char*, std::function<CheckResult()>> checks[] = {
        {"lab_golden_values", [&] { return lab_golden(constants); }},
        {"ratio_g_equals_t0", [&] { return ratio_identity(constants); }},
        {"mirror_ratio_r_over_t", [&] { return mirror_ratio(constants); }},
        {"resonance_sensitivity_identities", resonance_identities},
        {"force_psd_decomposition_and_periodicity", decomposition_periodicity},
        {"extremal_angles_cancel_quadrature", extremal_angle_zeros},
        {"minimum_uncertainty_product", minimum_uncertainty},
        {"squeezing_limits", squeezing_limits},
        {"sql_band_g20", sql_band},
        {"detection_bandwidth_log2_ratio", bandwidth},
        {"oracle_harmonic_transfer", oracle_harmonic},
        {"oracle_vacuum_calibration", oracle_vacuum},
    };
    ValidationReport report;
    for (const auto& [name, check] : checks) {
        try {
            report.checks.push_back(check());
        } catch (const std::exception& e) {
            report.checks.push_back({name, false, std::string("raised: ") + e.what()});
        }
    }
    return report;
}

} // namespace optospring
