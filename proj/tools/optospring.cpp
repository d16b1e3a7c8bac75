#include "optospring/commands.hpp"
#include "optospring/config.hpp"
#include "optospring/errors.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

namespace {

using namespace optospring;

// OPTOSPRING_VALIDATE_PERTURB="hbar=1.001" or "c=0.999" scales one constant
// before the validation suite runs.
Constants perturbed_constants()
{
    Constants c = kCodata;
    const char* env = std::getenv("OPTOSPRING_VALIDATE_PERTURB");
    if (env == nullptr || *env == '\0') {
        return c;
    }
    const std::string spec(env);
    const auto eq = spec.find('=');
    if (eq == std::string::npos) {
        throw ConfigError("OPTOSPRING_VALIDATE_PERTURB must look like name=factor");
    }
    const std::string name = spec.substr(0, eq);
    double factor = 0.0;
    try {
        factor = std::stod(spec.substr(eq + 1));
    } catch (const std::exception&) {
        throw ConfigError("OPTOSPRING_VALIDATE_PERTURB factor is not a number");
    }
    if (name == "hbar") {
        c.hbar *= factor;
    } else if (name == "c") {
        c.speed_of_light *= factor;
    } else {
        throw ConfigError("OPTOSPRING_VALIDATE_PERTURB names unknown constant '" + name + "'");
    }
    std::cerr << "validation running with " << name << " scaled by " << factor << "\n";
    return c;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Optomechanical spring, force-sensing and squeezing spectra"};
    std::string command;
    std::string config_path;
    std::string out_path;
    std::vector<std::string> overrides;
    app.add_option("command", command, "derive | spectrum | squeeze | simulate | validate | figures")
        ->required()
        ->check(CLI::IsMember({"derive", "spectrum", "squeeze", "simulate", "validate", "figures"}));
    app.add_option("--config", config_path, "run configuration file");
    app.add_option("--out", out_path, "output file (directory for figures); stdout when absent");
    app.add_option("--set", overrides, "override, section.key=value (repeatable)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        OutputTarget out;
        out.stream = &std::cout;
        if (!out_path.empty()) {
            out.path = out_path;
        }
        if (command == "validate") {
            return cmd_validate(out, perturbed_constants());
        }
        if (command == "figures") {
            cmd_figures(out_path.empty() ? "figures" : out_path, std::cerr);
            return kExitOk;
        }
        if (config_path.empty()) {
            throw ConfigError("--config is required for " + command);
        }
        const RunConfig config = load_config(config_path, overrides);
        if (command == "derive") {
            cmd_derive(config, out, std::cerr);
        } else if (command == "spectrum") {
            cmd_spectrum(config, out, std::cerr);
        } else if (command == "squeeze") {
            cmd_squeeze(config, out, std::cerr);
        } else {
            cmd_simulate(config, out, std::cerr);
        }
        return kExitOk;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
}
