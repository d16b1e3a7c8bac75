#pragma once

#include "optospring/config.hpp"
#include "optospring/constants.hpp"
#include "optospring/spectrum.hpp"

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

namespace optospring {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitValidation = 4;

/// Destination of a command's primary output: a file (written atomically)
/// or the given stream.
struct OutputTarget {
    std::optional<std::filesystem::path> path;
    std::ostream* stream = nullptr;

    void emit(const std::string& content) const;
};

// Writes via a temporary sibling file and rename.
void write_atomic(const std::filesystem::path& path, const std::string& content);

std::string format_number(double v);  // %.12e

// x,omega_rad_s,s_f,s_a1,s_phi1,theta_rad,sql
std::string spectrum_csv(const SpectrumResult& force);
// x,s_theta,s_min,s_max,theta_opt_rad,s_db
std::string squeeze_csv(const SpectrumResult& squeeze);
// x,omega_rad_s,s_theta,stderr_s_theta,s_theta_analytic,theta_rad
std::string simulate_csv(const SpectrumResult& estimate, const SpectrumResult& analytic,
                         double theta);

std::string derive_report(const RunConfig& config, const Constants& constants = kCodata);

void cmd_derive(const RunConfig& config, const OutputTarget& out, std::ostream& log,
                const Constants& constants = kCodata);
void cmd_spectrum(const RunConfig& config, const OutputTarget& out, std::ostream& log,
                  const Constants& constants = kCodata);
void cmd_squeeze(const RunConfig& config, const OutputTarget& out, std::ostream& log,
                 const Constants& constants = kCodata);
void cmd_simulate(const RunConfig& config, const OutputTarget& out, std::ostream& log,
                  const Constants& constants = kCodata);
// Writes the six figure tables into directory.
void cmd_figures(const std::filesystem::path& directory, std::ostream& log);
// Returns kExitOk or kExitValidation.
int cmd_validate(const OutputTarget& out, const Constants& constants = kCodata);

} // namespace optospring
