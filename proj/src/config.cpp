#include "optospring/config.hpp"

#include "optospring/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace optospring {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& schema()
{
    static const std::map<std::string, std::set<std::string>> s = {
        {"cavity", {"length_m", "t0", "pump_freq_thz", "mass_kg", "input_power_w", "tau_s"}},
        {"coupling",
         {"mode", "xi_per_m", "eta_per_m", "gamma0_per_s", "r_m", "t_m", "t1", "x0", "g"}},
        {"sweep", {"x_min", "x_max", "points", "scale"}},
        {"homodyne", {"mode", "theta_rad", "x_c"}},
        {"oracle",
         {"dt", "duration", "segments", "seed", "gamma_m_rel", "noise", "drive_amplitude",
          "drive_x", "threads", "trace_path"}},
    };
    return s;
}

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

// Drops an inline comment (";" or "#" after whitespace) and surrounding quotes.
std::string clean_value(const std::string& raw)
{
    std::string v = raw;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if ((v[i] == ';' || v[i] == '#') && (v[i - 1] == ' ' || v[i - 1] == '\t')) {
            v.resize(i);
            break;
        }
    }
    v = trim(v);
    if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front()) {
        v = v.substr(1, v.size() - 2);
    }
    return v;
}

class Reader {
public:
    Reader(const pt::ptree& tree, std::string source, const std::string& text)
        : tree_(tree), source_(std::move(source)), text_(text)
    {
    }

    std::optional<std::string> text(const std::string& section, const std::string& key) const
    {
        const auto node = tree_.get_child_optional(pt::ptree::path_type(section + "." + key, '.'));
        if (!node) {
            return std::nullopt;
        }
        return clean_value(node->data());
    }

    std::optional<double> number(const std::string& section, const std::string& key) const
    {
        const auto s = text(section, key);
        if (!s) {
            return std::nullopt;
        }
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(s->data(), s->data() + s->size(), v);
        if (ec != std::errc() || ptr != s->data() + s->size() || !std::isfinite(v)) {
            fail(section, key, "expected a finite number, got '" + *s + "'");
        }
        return v;
    }

    double number_or(const std::string& section, const std::string& key, double fallback) const
    {
        return number(section, key).value_or(fallback);
    }

    double positive(const std::string& section, const std::string& key, double fallback) const
    {
        const double v = number_or(section, key, fallback);
        if (!(v > 0.0)) {
            fail(section, key, "must be positive");
        }
        return v;
    }

    std::optional<long long> integer(const std::string& section, const std::string& key) const
    {
        const auto s = text(section, key);
        if (!s) {
            return std::nullopt;
        }
        long long v = 0;
        const auto [ptr, ec] = std::from_chars(s->data(), s->data() + s->size(), v);
        if (ec != std::errc() || ptr != s->data() + s->size()) {
            fail(section, key, "expected an integer, got '" + *s + "'");
        }
        return v;
    }

    std::optional<bool> boolean(const std::string& section, const std::string& key) const
    {
        const auto s = text(section, key);
        if (!s) {
            return std::nullopt;
        }
        if (*s == "true" || *s == "1" || *s == "yes") {
            return true;
        }
        if (*s == "false" || *s == "0" || *s == "no") {
            return false;
        }
        fail(section, key, "expected true or false, got '" + *s + "'");
    }

    [[noreturn]] void fail(const std::string& section, const std::string& key,
                           const std::string& what) const
    {
        std::ostringstream msg;
        msg << source_;
        if (const auto line = line_of(section, key)) {
            msg << ":" << *line;
        }
        msg << ": [" << section << "] " << key << ": " << what;
        throw ConfigError(msg.str());
    }

    // Line on which key appears inside [section], if it came from the file.
    std::optional<int> line_of(const std::string& section, const std::string& key) const
    {
        std::istringstream in(text_);
        std::string line;
        std::string current;
        int number = 0;
        while (std::getline(in, line)) {
            ++number;
            const std::string t = trim(line);
            if (t.size() >= 2 && t.front() == '[' && t.back() == ']') {
                current = trim(std::string_view(t).substr(1, t.size() - 2));
                continue;
            }
            const auto eq = t.find('=');
            if (current == section && eq != std::string::npos && trim(t.substr(0, eq)) == key) {
                return number;
            }
        }
        return std::nullopt;
    }

private:
    const pt::ptree& tree_;
    std::string source_;
    const std::string& text_;
};

void apply_override(pt::ptree& tree, const std::string& item)
{
    const auto eq = item.find('=');
    const auto dot = item.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
        throw ConfigError("override '" + item + "' is not of the form section.key=value");
    }
    const std::string section = trim(item.substr(0, dot));
    const std::string key = trim(item.substr(dot + 1, eq - dot - 1));
    if (section.empty() || key.empty()) {
        throw ConfigError("override '" + item + "' has an empty section or key");
    }
    tree.put(pt::ptree::path_type(section + "." + key, '.'), trim(item.substr(eq + 1)));
}

void check_keys(const pt::ptree& tree, const Reader& reader, const std::string& source)
{
    for (const auto& [section, body] : tree) {
        const auto it = schema().find(section);
        if (it == schema().end()) {
            if (body.empty()) {
                throw ConfigError(source + ": key '" + section + "' outside any section");
            }
            throw ConfigError(source + ": unknown section [" + section + "]");
        }
        for (const auto& [key, value] : body) {
            if (!it->second.contains(key)) {
                reader.fail(section, key, "unknown key");
            }
        }
    }
}

HomodyneMode parse_homodyne_mode(const std::string& s, const Reader& r)
{
    if (s == "fixed") return HomodyneMode::Fixed;
    if (s == "extremal_a") return HomodyneMode::ExtremalA;
    if (s == "extremal_phi") return HomodyneMode::ExtremalPhi;
    if (s == "optimal") return HomodyneMode::OptimalPerFrequency;
    r.fail("homodyne", "mode", "expected fixed, extremal_a, extremal_phi or optimal, got '" + s + "'");
}

CouplingMode parse_coupling_mode(const std::string& s, const Reader& r)
{
    if (s == "bs") return CouplingMode::BeamSplitter;
    if (s == "mirror") return CouplingMode::Mirror;
    if (s == "direct") return CouplingMode::Direct;
    if (s == "dimensionless") return CouplingMode::Dimensionless;
    r.fail("coupling", "mode", "expected bs, mirror, direct or dimensionless, got '" + s + "'");
}

} // namespace

RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides,
                       const std::string& source)
{
    pt::ptree tree;
    try {
        std::istringstream in(text);
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        std::ostringstream msg;
        msg << source << ":" << e.line() << ": " << e.message();
        throw ConfigError(msg.str());
    }
    for (const auto& item : overrides) {
        apply_override(tree, item);
    }
    const Reader r(tree, source, text);
    check_keys(tree, r, source);

    RunConfig c;
    c.cavity.length_m = r.positive("cavity", "length_m", c.cavity.length_m);
    c.cavity.t0 = r.positive("cavity", "t0", c.cavity.t0);
    c.cavity.pump_freq_thz = r.positive("cavity", "pump_freq_thz", c.cavity.pump_freq_thz);
    c.cavity.mass_kg = r.positive("cavity", "mass_kg", c.cavity.mass_kg);
    c.cavity.input_power_w = r.positive("cavity", "input_power_w", c.cavity.input_power_w);
    if (r.number("cavity", "tau_s")) {
        c.cavity.tau_s = r.positive("cavity", "tau_s", 0.0);
    }

    if (const auto mode = r.text("coupling", "mode")) {
        c.coupling.mode = parse_coupling_mode(*mode, r);
    }
    c.coupling.xi_per_m = r.number_or("coupling", "xi_per_m", c.coupling.xi_per_m);
    c.coupling.eta_per_m = r.number_or("coupling", "eta_per_m", c.coupling.eta_per_m);
    if (r.number("coupling", "gamma0_per_s")) {
        c.coupling.gamma0_per_s = r.positive("coupling", "gamma0_per_s", 0.0);
    }
    c.coupling.r_m = r.number_or("coupling", "r_m", c.coupling.r_m);
    c.coupling.t_m = r.number_or("coupling", "t_m", c.coupling.t_m);
    c.coupling.t1 = r.positive("coupling", "t1", c.coupling.t1);
    c.coupling.x0 = r.positive("coupling", "x0", c.coupling.x0);
    c.coupling.g = r.positive("coupling", "g", c.coupling.g);
    if (c.coupling.mode == CouplingMode::Direct && !c.coupling.gamma0_per_s) {
        r.fail("coupling", "gamma0_per_s", "required when mode = direct");
    }

    if (r.number("sweep", "x_min")) {
        c.sweep.x_min = r.positive("sweep", "x_min", 0.0);
    }
    if (r.number("sweep", "x_max")) {
        c.sweep.x_max = r.positive("sweep", "x_max", 0.0);
    }
    if (const auto points = r.integer("sweep", "points")) {
        if (*points < 2 || *points > 10'000'000) {
            r.fail("sweep", "points", "must lie in [2, 1e7]");
        }
        c.sweep.points = static_cast<std::size_t>(*points);
    }
    if (const auto scale = r.text("sweep", "scale")) {
        if (*scale != "log" && *scale != "lin") {
            r.fail("sweep", "scale", "expected log or lin, got '" + *scale + "'");
        }
        c.sweep.logarithmic = *scale == "log";
    }
    if (c.sweep.x_min && c.sweep.x_max && !(*c.sweep.x_max > *c.sweep.x_min)) {
        r.fail("sweep", "x_max", "must exceed x_min");
    }

    if (const auto mode = r.text("homodyne", "mode")) {
        c.homodyne.mode = parse_homodyne_mode(*mode, r);
    }
    c.homodyne.theta = r.number_or("homodyne", "theta_rad", 0.0);
    if (r.number("homodyne", "x_c")) {
        c.homodyne.x_c = r.positive("homodyne", "x_c", 0.0);
        c.x_c_given = true;
    }

    OracleConfig& o = c.oracle;
    o.dt = r.positive("oracle", "dt", o.dt);
    o.duration = r.positive("oracle", "duration", o.duration);
    if (const auto n = r.integer("oracle", "segments")) {
        if (*n < 1 || *n > 1'000'000) {
            r.fail("oracle", "segments", "must lie in [1, 1e6]");
        }
        o.segments = static_cast<int>(*n);
    }
    if (const auto seed = r.integer("oracle", "seed")) {
        o.seed = static_cast<std::uint64_t>(*seed);
    }
    o.gamma_m_rel = r.number_or("oracle", "gamma_m_rel", o.gamma_m_rel);
    if (o.gamma_m_rel < 0.0) {
        r.fail("oracle", "gamma_m_rel", "must be non-negative");
    }
    o.noise = r.boolean("oracle", "noise").value_or(true);
    if (r.number("oracle", "drive_x")) {
        const double amplitude = r.number_or("oracle", "drive_amplitude", 1.0);
        if (amplitude == 0.0) {
            r.fail("oracle", "drive_amplitude", "must be non-zero when drive_x is set");
        }
        o.drive = SinusoidDrive{amplitude, r.positive("oracle", "drive_x", 0.0)};
    } else if (r.number("oracle", "drive_amplitude")) {
        r.fail("oracle", "drive_amplitude", "needs drive_x");
    }
    if (const auto threads = r.integer("oracle", "threads")) {
        if (*threads < 0 || *threads > 4096) {
            r.fail("oracle", "threads", "must lie in [0, 4096]");
        }
        o.threads = static_cast<unsigned>(*threads);
    }
    if (const auto path = r.text("oracle", "trace_path"); path && !path->empty()) {
        c.trace_path = *path;
    }
    return c;
}

RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open config file " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), overrides, path.string());
}

ResolvedModel resolve_model(const RunConfig& config, const Constants& constants)
{
    ResolvedModel out;
    const CavityConfig& cav = config.cavity;
    const double w0 = 2.0 * kPi * cav.pump_freq_thz * 1e12;

    if (config.coupling.mode == CouplingMode::Dimensionless) {
        out.model = DimensionlessModel::from_ratio(config.coupling.x0, config.coupling.g,
                                                   config.coupling.gamma0_per_s.value_or(1.5e4));
        return out;
    }

    CouplingCoefficients coupling;
    if (config.coupling.mode == CouplingMode::Direct) {
        coupling.half_bandwidth = *config.coupling.gamma0_per_s;
        coupling.dispersive_coeff = config.coupling.xi_per_m;
        coupling.dissipative_coeff = config.coupling.eta_per_m;
    } else {
        MsiGeometry g;
        g.cavity_length = cav.length_m;
        g.pump_angular_frequency = w0;
        g.round_trip_time = cav.tau_s;
        if (config.coupling.mode == CouplingMode::BeamSplitter) {
            g.variant = MsiVariant::MovableBeamSplitter;
            g.mean_transmittance = cav.t0;
            coupling = derive_bs_coupling(g, constants);
        } else {
            g.variant = MsiVariant::MovableMirror;
            g.mean_transmittance = config.coupling.t1;
            g.mirror_reflectivity = config.coupling.r_m;
            g.mirror_transmittance = config.coupling.t_m;
            coupling = derive_mirror_coupling(g, constants);
        }
        out.geometry = g;
    }
    out.physical = PhysicalParams::from_coupling(coupling, cav.mass_kg, w0, cav.input_power_w);
    out.model = reduce(*out.physical, constants);
    return out;
}

std::vector<double> sweep_grid(const RunConfig& config, const DimensionlessModel& model)
{
    const SweepConfig& s = config.sweep;
    if ((!s.x_min || !s.x_max) && !(model.x0 > 0.0)) {
        throw DomainError("model has no spring (x0 = 0); set sweep.x_min and sweep.x_max");
    }
    const double lo = s.x_min.value_or(model.x0 / 30.0);
    const double hi = s.x_max.value_or(30.0 * model.x0);
    return s.logarithmic ? log_grid(lo, hi, s.points) : lin_grid(lo, hi, s.points);
}

HomodyneSetting effective_homodyne(const RunConfig& config, const DimensionlessModel& model)
{
    HomodyneSetting h = config.homodyne;
    const bool needs_xc =
        h.mode == HomodyneMode::ExtremalA || h.mode == HomodyneMode::ExtremalPhi;
    if (needs_xc && !config.x_c_given) {
        h.x_c = model.x0;
    }
    if (h.mode == HomodyneMode::OptimalPerFrequency && !config.x_c_given) {
        h.x_c = 0.0;
    }
    return h;
}

} // namespace optospring
