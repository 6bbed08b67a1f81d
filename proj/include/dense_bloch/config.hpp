#ifndef DENSE_BLOCH_CONFIG_HPP
#define DENSE_BLOCH_CONFIG_HPP

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "dense_bloch/bistability.hpp"
#include "dense_bloch/core.hpp"

// Scenario configuration: flat 'key = value' text with bracketed section
// headers. Unknown sections or keys are rejected; redundant specifications
// (dimensionless groups alongside SI parameters) must agree.

namespace dense_bloch {

inline constexpr const char* kVersion = "0.1.0";

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Scenario { decay, spectrum, holstein, bistability, rates };

Scenario scenario_from_string(const std::string& name);
std::string to_string(Scenario scenario);

using ConfigSections = std::map<std::string, std::map<std::string, std::string>>;

ConfigSections parse_config_text(const std::string& text);
ConfigSections parse_config_file(const std::string& path);

struct RunConfig {
    Scenario scenario = Scenario::decay;
    std::string out_dir = ".";

    DimensionlessGroups groups;
    bool has_medium = false;

    // decay / spectrum
    double rho_aa0 = 1.0;
    double t_end = 20.0;
    int samples = 400;
    bool include_shift = false;
    std::vector<double> snapshot_times;
    double span_doppler = 6.0;
    int spectrum_points = 241;

    // holstein
    double kappa = 0.0;
    int node_count = 200;
    bool export_kernel = false;

    // bistability
    BistabilityConfig bistability;

    // rates
    double rates_rho_aa = 1.0;

    // tolerance overrides
    double ode_tol = 1e-10;
    double quad_tol = 1e-7;

    // resolved key/value pairs recorded in every output header
    std::vector<std::pair<std::string, std::string>> resolved;
};

// Parse + schema check + group resolution. Throws ConfigError.
RunConfig load_run_config(const std::string& path);
RunConfig load_run_config_text(const std::string& text);

} // namespace dense_bloch

#endif
