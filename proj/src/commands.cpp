#include "optospring/commands.hpp"

#include "optospring/errors.hpp"
#include "optospring/force_sensing.hpp"
#include "optospring/langevin_oracle.hpp"
#include "optospring/rigidity.hpp"
#include "optospring/squeezing.hpp"
#include "optospring/validate.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

namespace optospring {

namespace fs = std::filesystem;

namespace {

void log_warnings(const SpectrumResult& r, std::ostream& log)
{
    for (const auto& w : r.warnings) {
        log << "warning: " << w << "\n";
    }
}

std::string row(std::initializer_list<double> values)
{
    std::string line;
    bool first = true;
    for (double v : values) {
        if (!first) {
            line += ',';
        }
        line += format_number(v);
        first = false;
    }
    line += '\n';
    return line;
}

// Homodyne angle for a time-domain run, which needs one fixed angle.
double fixed_angle(const RunConfig& config, const DimensionlessModel& model)
{
    const HomodyneSetting h = effective_homodyne(config, model);
    switch (h.mode) {
    case HomodyneMode::Fixed: return reduce_angle(h.theta);
    case HomodyneMode::ExtremalA:
    case HomodyneMode::ExtremalPhi: return resolve_force_angle(h, h.x_c, model);
    case HomodyneMode::OptimalPerFrequency: {
        const double x_c = h.x_c > 0.0 ? h.x_c : model.x0;
        return optimal_angle_at(x_c, model).theta;
    }
    }
    throw DomainError("unknown homodyne mode");
}

double analytic_output_psd(double x, double theta, const DimensionlessModel& model, double damping)
{
    const QuadratureGains gains = quadrature_transfer(x, theta, model, damping);
    return std::norm(gains.noise_a) + std::norm(gains.noise_phi);
}

} // namespace

void OutputTarget::emit(const std::string& content) const
{
    if (path) {
        write_atomic(*path, content);
    } else if (stream != nullptr) {
        *stream << content;
        stream->flush();
    }
}

void write_atomic(const fs::path& path, const std::string& content)
{
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error("cannot open " + tmp.string() + " for writing");
        }
        out << content;
        out.flush();
        if (!out) {
            throw Error("write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw Error("cannot move output into place at " + path.string() + ": " + ec.message());
    }
}

std::string format_number(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12e", v);
    return buf;
}

std::string spectrum_csv(const SpectrumResult& r)
{
    std::string out = "x,omega_rad_s,s_f,s_a1,s_phi1,theta_rad,sql\n";
    const auto& s_f = r.channel("s_f");
    const auto& s_a1 = r.channel("s_a1");
    const auto& s_phi1 = r.channel("s_phi1");
    const auto& theta = r.channel("theta_used");
    for (std::size_t k = 0; k < r.x.size(); ++k) {
        out += row({r.x[k], r.omega[k], s_f[k], s_a1[k], s_phi1[k], theta[k], 1.0});
    }
    return out;
}

std::string squeeze_csv(const SpectrumResult& r)
{
    std::string out = "x,s_theta,s_min,s_max,theta_opt_rad,s_db\n";
    const auto& s = r.channel("s_theta");
    const auto& lo = r.channel("s_min");
    const auto& hi = r.channel("s_max");
    const auto& theta = r.channel("theta_opt");
    const auto& db = r.channel("s_db");
    for (std::size_t k = 0; k < r.x.size(); ++k) {
        out += row({r.x[k], s[k], lo[k], hi[k], theta[k], db[k]});
    }
    return out;
}

std::string simulate_csv(const SpectrumResult& estimate, const SpectrumResult& analytic,
                         double theta)
{
    std::string out = "x,omega_rad_s,s_theta,stderr_s_theta,s_theta_analytic,theta_rad\n";
    const auto& s = estimate.channel("s_theta");
    const auto& se = estimate.channel("stderr_s_theta");
    const auto& a = analytic.channel("s_theta");
    for (std::size_t k = 0; k < estimate.x.size(); ++k) {
        out += row({estimate.x[k], estimate.omega[k], s[k], se[k], a[k], theta});
    }
    return out;
}

std::string derive_report(const RunConfig& config, const Constants& constants)
{
    const ResolvedModel resolved = resolve_model(config, constants);
    const DimensionlessModel& m = resolved.model;
    std::ostringstream out;
    const auto line = [&](const char* name, double value, const char* unit) {
        out << name << " = " << format_number(value);
        if (*unit != '\0') {
            out << " " << unit;
        }
        out << "\n";
    };

    if (resolved.physical) {
        const PhysicalParams& p = *resolved.physical;
        const SpringConstants s = spring_constants(p, constants);
        line("gamma0", p.half_bandwidth, "1/s");
        line("xi", p.dispersive_coeff, "1/m");
        line("eta", p.dissipative_coeff, "1/m");
        line("photon_flux", p.photon_flux(constants), "1/s");
        line("p_m", m.p_m, "");
        line("q_m", m.q_m, "");
        line("D", m.quality, "");
        line("qm_d2", m.qm_d2(), "");
        line("g", m.coupling_ratio, "");
        line("x0", m.x0, "");
        line("kappa", s.kappa, "N/m");
        line("delta", s.delta, "N s/m");
        line("omega0", s.omega0_mech.value_or(0.0), "rad/s");
        line("delta_m", m.delta_m, "");
        out << "stability = " << to_string(stability_class(p)) << "\n";
    } else {
        line("gamma0", m.gamma0, "1/s");
        line("p_m", m.p_m, "");
        line("qm_d2", m.qm_d2(), "");
        line("g", m.coupling_ratio, "");
        line("x0", m.x0, "");
        line("omega0", m.x0 * m.gamma0, "rad/s");
        line("delta_m", m.delta_m, "");
        out << "stability = " << to_string(stability_class(m)) << "\n";
    }
    if (resolved.geometry && resolved.geometry->variant == MsiVariant::MovableMirror) {
        const MirrorRatioCheck check = mirror_ratio_check(*resolved.geometry, constants);
        line("g_from_coefficients", check.from_coefficients, "");
        line("g_quoted_r_over_t", check.quoted, "");
        out << "mirror_ratio_consistent = " << (check.consistent ? "true" : "false") << "\n";
    }
    if (m.outside_small_frequency_regime()) {
        out << "warning = x0 outside the small-frequency regime\n";
    }
    return out.str();
}

void cmd_derive(const RunConfig& config, const OutputTarget& out, std::ostream& log,
                const Constants& constants)
{
    const std::string report = derive_report(config, constants);
    const ResolvedModel resolved = resolve_model(config, constants);
    if (resolved.geometry && resolved.geometry->variant == MsiVariant::MovableMirror &&
        !mirror_ratio_check(*resolved.geometry, constants).consistent) {
        log << "warning: mirror coefficients disagree with r/t by more than 10%\n";
    }
    out.emit(report);
}

void cmd_spectrum(const RunConfig& config, const OutputTarget& out, std::ostream& log,
                  const Constants& constants)
{
    const DimensionlessModel model = resolve_model(config, constants).model;
    const std::vector<double> grid = sweep_grid(config, model);
    const SpectrumResult r = force_spectrum(model, effective_homodyne(config, model), grid);
    log_warnings(r, log);
    out.emit(spectrum_csv(r));
}

void cmd_squeeze(const RunConfig& config, const OutputTarget& out, std::ostream& log,
                 const Constants& constants)
{
    const DimensionlessModel model = resolve_model(config, constants).model;
    const std::vector<double> grid = sweep_grid(config, model);
    const SpectrumResult r = squeeze_spectrum(model, effective_homodyne(config, model), grid);
    log_warnings(r, log);
    out.emit(squeeze_csv(r));
}

void cmd_simulate(const RunConfig& config, const OutputTarget& out, std::ostream& log,
                  const Constants& constants)
{
    const DimensionlessModel model = resolve_model(config, constants).model;
    const OracleConfig& oracle = config.oracle;
    oracle.validate(model);
    const double theta = fixed_angle(config, model);

    if (config.trace_path) {
        std::ostringstream csv;
        write_trace_csv(csv, simulate_trajectory(model, oracle, 0));
        write_atomic(*config.trace_path, csv.str());
        log << "trace written to " << config.trace_path->string() << "\n";
    }

    if (oracle.drive && !oracle.noise) {
        const HarmonicTransfer h =
            harmonic_transfer_check(model, oracle.drive->x_drive, theta, oracle);
        std::string csv =
            "x_drive,theta_rad,measured_re,measured_im,analytic_re,analytic_im,relative_error\n";
        csv += row({oracle.drive->x_drive, theta, h.measured.real(), h.measured.imag(),
                    h.analytic.real(), h.analytic.imag(), h.relative_error});
        out.emit(csv);
        return;
    }
    if (!oracle.noise) {
        throw DomainError("oracle.noise = false needs a drive (oracle.drive_x)");
    }
    if (oracle.drive) {
        log << "note: the sinusoidal drive is ignored by the noise ensemble\n";
    }

    double x_lo = 0.01;
    double x_hi = 1.0;
    if (model.x0 > 0.0) {
        x_lo = 0.2 * model.x0;
        x_hi = 3.0 * model.x0;
    }
    x_lo = config.sweep.x_min.value_or(x_lo);
    x_hi = config.sweep.x_max.value_or(x_hi);

    OracleConfig ensemble = oracle;
    ensemble.drive.reset();
    const SpectrumResult estimate = simulate_output_psd(model, ensemble, theta, x_lo, x_hi);
    SpectrumResult analytic;
    analytic.set_grid(estimate.x, model.gamma0);
    auto& s = analytic.add_channel("s_theta");
    for (std::size_t k = 0; k < analytic.x.size(); ++k) {
        s[k] = analytic_output_psd(analytic.x[k], theta, model, ensemble.damping(model));
    }
    out.emit(simulate_csv(estimate, analytic, theta));
}

void cmd_figures(const fs::path& directory, std::ostream& log)
{
    constexpr double x0 = 0.05;
    const std::vector<double> grid = log_grid(x0 / 10.0, 5.0 * x0, 1000);

    for (const double g : {0.1, 20.0, 400.0}) {
        const DimensionlessModel model = DimensionlessModel::from_ratio(x0, g);
        std::string csv = "curve,x,omega_rad_s,s_f,s_a1,s_phi1,theta_rad,sql\n";
        const std::pair<const char*, HomodyneSetting> curves[] = {
            {"theta_0", {HomodyneMode::Fixed, 0.0, 0.0}},
            {"theta_pi2", {HomodyneMode::Fixed, kHalfPi, 0.0}},
            {"optimal", {HomodyneMode::OptimalPerFrequency, 0.0, 0.0}},
        };
        for (const auto& [name, setting] : curves) {
            const std::string body = spectrum_csv(force_spectrum(model, setting, grid));
            std::istringstream lines(body);
            std::string l;
            std::getline(lines, l);  // header
            while (std::getline(lines, l)) {
                csv += std::string(name) + "," + l + "\n";
            }
        }
        char file[64];
        std::snprintf(file, sizeof file, "force_noise_g%g.csv", g);
        write_atomic(directory / file, csv);
        log << "wrote " << (directory / file).string() << "\n";
    }

    for (const double g : {0.2, 20.0, 2000.0}) {
        const DimensionlessModel model = DimensionlessModel::from_ratio(x0, g);
        std::string csv = "curve,x,omega_rad_s,s_theta,theta_rad,s_envelope,s_db\n";
        for (const double factor : {0.5, 1.5}) {
            const SpectrumResult r = optimal_psd_curve(factor * x0, grid, model);
            const auto& s = r.channel("s_theta");
            const auto& theta = r.channel("theta_used");
            const auto& env = r.channel("s_envelope");
            const std::string name = factor == 0.5 ? "xc_0.5x0" : "xc_1.5x0";
            for (std::size_t k = 0; k < r.x.size(); ++k) {
                csv += name + "," +
                       row({r.x[k], r.omega[k], s[k], theta[k], env[k], to_db(s[k])});
            }
        }
        char file[64];
        std::snprintf(file, sizeof file, "squeezing_g%g.csv", g);
        write_atomic(directory / file, csv);
        log << "wrote " << (directory / file).string() << "\n";
    }
}

int cmd_validate(const OutputTarget& out, const Constants& constants)
{
    const ValidationReport report = run_validation(constants);
    out.emit(report.format());
    return report.passed() ? kExitOk : kExitValidation;
}

} // namespace optospring
