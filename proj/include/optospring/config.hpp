#pragma once

#include "optospring/constants.hpp"
#include "optospring/force_sensing.hpp"
#include "optospring/langevin_oracle.hpp"
#include "optospring/model_params.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace optospring {

enum class CouplingMode {
    BeamSplitter,   // "bs"
    Mirror,         // "mirror"
    Direct,         // "direct": xi, eta, gamma0 given
    Dimensionless,  // "dimensionless": x0, g given
};

struct CavityConfig {
    double length_m = 1.0;
    double t0 = 0.01;
    double pump_freq_thz = 300.0;  // omega0 / (2 pi), THz
    double mass_kg = 0.05;
    double input_power_w = 0.042;
    std::optional<double> tau_s;   // round trip time; 2L/c when absent
};

struct CouplingConfig {
    CouplingMode mode = CouplingMode::BeamSplitter;
    double xi_per_m = 0.0;
    double eta_per_m = 0.0;
    std::optional<double> gamma0_per_s;
    double r_m = 1.0;
    double t_m = 0.0;
    double t1 = 0.01;
    double x0 = 0.05;
    double g = 0.01;
};

struct SweepConfig {
    std::optional<double> x_min;  // x0 / 30 when absent
    std::optional<double> x_max;  // 30 x0 when absent
    std::size_t points = 2000;
    bool logarithmic = true;
};

struct RunConfig {
    CavityConfig cavity;
    CouplingConfig coupling;
    SweepConfig sweep;
    HomodyneSetting homodyne;
    bool x_c_given = false;
    OracleConfig oracle;
    std::optional<std::filesystem::path> trace_path;
};

/// Sectioned key = value text. Overrides are "section.key=value" strings
/// applied before validation. Unknown sections and keys throw ConfigError.
RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {},
                       const std::string& source = "<config>");
RunConfig load_config(const std::filesystem::path& path,
                      const std::vector<std::string>& overrides = {});

struct ResolvedModel {
    DimensionlessModel model;
    std::optional<PhysicalParams> physical;  // absent in dimensionless mode
    std::optional<MsiGeometry> geometry;     // bs and mirror modes
};

ResolvedModel resolve_model(const RunConfig& config, const Constants& constants = kCodata);

// Sweep grid; defaults centre on x0.
std::vector<double> sweep_grid(const RunConfig& config, const DimensionlessModel& model);

// Homodyne setting with x_c defaulted to x0 for modes that need it.
HomodyneSetting effective_homodyne(const RunConfig& config, const DimensionlessModel& model);

} // namespace optospring
