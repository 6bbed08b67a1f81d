#include "dense_bloch/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dense_bloch/csv.hpp"

namespace dense_bloch {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos)
        return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size())
            throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': cannot parse number '" + value + "'");
    }
}

int parse_int(const std::string& key, const std::string& value) {
    const double v = parse_double(key, value);
    if (v != std::floor(v))
        throw ConfigError("config key '" + key + "': expected an integer, got '" + value + "'");
    return static_cast<int>(v);
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes")
        return true;
    if (value == "false" || value == "0" || value == "no")
        return false;
    throw ConfigError("config key '" + key + "': expected a boolean, got '" + value + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty())
            out.push_back(parse_double(key, item));
    }
    return out;
}

// Tracks which keys a scenario consumed so leftovers can be rejected.
class SectionReader {
  public:
    SectionReader(const ConfigSections& sections, std::string name)
        : name_(std::move(name)) {
        const auto it = sections.find(name_);
        if (it != sections.end())
            entries_ = it->second;
    }

    bool has(const std::string& key) const { return entries_.count(key) > 0; }

    std::string take(const std::string& key) {
        const auto it = entries_.find(key);
        if (it == entries_.end())
            throw ConfigError("missing required key '" + key + "' in section [" + name_ + "]");
        taken_.insert(taken_.end(), key);
        return it->second;
    }

    std::string take_or(const std::string& key, const std::string& fallback) {
        if (!has(key))
            return fallback;
        return take(key);
    }

    void finish() const {
        std::vector<std::string> unknown;
        for (const auto& [key, value] : entries_)
            if (std::find(taken_.begin(), taken_.end(), key) == taken_.end())
                unknown.push_back(key);
        if (!unknown.empty()) {
            std::string msg = "unknown keys in section [" + name_ + "]:";
            for (const auto& k : unknown)
                msg += " " + k;
            throw ConfigError(msg);
        }
    }

  private:
    std::string name_;
    std::map<std::string, std::string> entries_;
    std::vector<std::string> taken_;
};

void check_consistent(const std::string& what, double given, double derived) {
    const double scale = std::max({std::abs(given), std::abs(derived), 1e-300});
    if (std::abs(given - derived) > 1e-9 * scale)
        throw ConfigError("inconsistent redundant specification of " + what + ": given " +
                          format_number(given) + ", derived " + format_number(derived));
}

// Groups from [medium]: direct (eta, g) and/or SI fields; both must agree.
DimensionlessGroups resolve_medium(SectionReader& medium, RunConfig& config) {
    const bool direct = medium.has("eta") || medium.has("g");
    const bool si_form = medium.has("atom_density") || medium.has("wavelength") ||
                         medium.has("sample_length") || medium.has("radiative_rate") ||
                         medium.has("doppler_width");

    DimensionlessGroups groups;
    DimensionlessGroups si_groups;
    bool have_si = false;
    if (si_form) {
        MediumParameters params;
        params.atom_density = parse_double("atom_density", medium.take("atom_density"));
        params.transition_wavelength = parse_double("wavelength", medium.take("wavelength"));
        params.sample_length = parse_double("sample_length", medium.take("sample_length"));
        params.radiative_rate = parse_double("radiative_rate", medium.take("radiative_rate"));
        params.doppler_width = parse_double("doppler_width", medium.take("doppler_width"));
        params.nonradiative_rate =
            parse_double("nonradiative_rate", medium.take_or("nonradiative_rate", "0"));
        try {
            si_groups = derive_groups(params);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("invalid medium parameters: ") + e.what());
        }
        have_si = true;
    }
    if (direct) {
        groups.eta = parse_double("eta", medium.take("eta"));
        groups.g = parse_double("g", medium.take("g"));
        groups.kappa = groups.eta * groups.g;
        if (medium.has("cooperativity"))
            groups.cooperativity = parse_double("cooperativity", medium.take("cooperativity"));
        if (medium.has("r"))
            groups.r = parse_double("r", medium.take("r"));
        if (have_si) {
            check_consistent("eta", groups.eta, si_groups.eta);
            check_consistent("g", groups.g, si_groups.g);
            if (groups.cooperativity > 0.0)
                check_consistent("cooperativity", groups.cooperativity, si_groups.cooperativity);
            if (groups.r > 0.0)
                check_consistent("r", groups.r, si_groups.r);
            groups = si_groups;
        } else if (groups.cooperativity > 0.0 && groups.r > 0.0) {
            // eta = 4 pi C r must hold when all three are specified
            check_consistent("eta (= 4 pi C r)", groups.eta,
                             4.0 * 3.14159265358979323846 * groups.cooperativity * groups.r);
        }
    } else if (have_si) {
        groups = si_groups;
    } else {
        throw ConfigError("section [medium] must specify (eta, g) or SI parameters");
    }
    if (medium.has("kappa")) {
        const double kappa = parse_double("kappa", medium.take("kappa"));
        check_consistent("kappa (= eta g)", kappa, groups.eta * groups.g);
    }
    try {
        groups.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid dimensionless groups: ") + e.what());
    }
    config.has_medium = true;
    return groups;
}

void record_groups(RunConfig& config) {
    config.resolved.emplace_back("eta", format_number(config.groups.eta));
    config.resolved.emplace_back("g", format_number(config.groups.g));
    config.resolved.emplace_back("kappa", format_number(config.groups.kappa));
    if (config.groups.cooperativity > 0.0)
        config.resolved.emplace_back("cooperativity", format_number(config.groups.cooperativity));
    if (config.groups.r > 0.0)
        config.resolved.emplace_back("r", format_number(config.groups.r));
}

} // namespace

Scenario scenario_from_string(const std::string& name) {
    if (name == "decay")
        return Scenario::decay;
    if (name == "spectrum")
        return Scenario::spectrum;
    if (name == "holstein")
        return Scenario::holstein;
    if (name == "bistability")
        return Scenario::bistability;
    if (name == "rates")
        return Scenario::rates;
    throw ConfigError("unknown scenario '" + name +
                      "' (expected decay | spectrum | holstein | bistability | rates)");
}

std::string to_string(Scenario scenario) {
    switch (scenario) {
    case Scenario::decay:
        return "decay";
    case Scenario::spectrum:
        return "spectrum";
    case Scenario::holstein:
        return "holstein";
    case Scenario::bistability:
        return "bistability";
    case Scenario::rates:
        return "rates";
    }
    return "?";
}

ConfigSections parse_config_text(const std::string& text) {
    ConfigSections sections;
    std::string current = "run";
    std::stringstream ss(text);
    std::string line;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == ';')
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
            current = trim(line.substr(1, line.size() - 2));
            if (current.empty())
                throw ConfigError("line " + std::to_string(line_no) + ": empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("line " + std::to_string(line_no) + ": empty key");
        if (sections[current].count(key))
            throw ConfigError("duplicate key '" + key + "' in section [" + current + "]");
        sections[current][key] = value;
    }
    return sections;
}

ConfigSections parse_config_file(const std::string& path) {
    std::ifstream file(path);
    if (!file)
        throw ConfigError("cannot open config file: " + path);
    std::stringstream buffer;
    buffer << file.rdbuf();
    return parse_config_text(buffer.str());
}

RunConfig load_run_config_text(const std::string& text) {
    const ConfigSections sections = parse_config_text(text);
    static const std::vector<std::string> known = {"run",      "medium",      "decay", "spectrum",
                                                   "holstein", "bistability", "rates", "tolerances"};
    for (const auto& [name, kv] : sections)
        if (std::find(known.begin(), known.end(), name) == known.end())
            throw ConfigError("unknown section [" + name + "]");

    RunConfig config;
    SectionReader run(sections, "run");
    config.scenario = scenario_from_string(run.take("scenario"));
    config.out_dir = run.take_or("out", ".");
    if (!parse_bool("deterministic", run.take_or("deterministic", "true")))
        throw ConfigError("the artifact has no nondeterministic mode; deterministic = false "
                          "is not supported");
    run.finish();

    SectionReader tolerances(sections, "tolerances");
    config.ode_tol = parse_double("ode_tol", tolerances.take_or("ode_tol", "1e-10"));
    config.quad_tol = parse_double("quad_tol", tolerances.take_or("quad_tol", "1e-7"));
    tolerances.finish();
    if (!(config.ode_tol > 0.0) || !(config.quad_tol > 0.0))
        throw ConfigError("[tolerances]: overrides must be positive");

    config.resolved.emplace_back("artifact", std::string("dense-bloch ") + kVersion);
    config.resolved.emplace_back("scenario", to_string(config.scenario));

    const bool needs_medium = config.scenario == Scenario::decay ||
                              config.scenario == Scenario::spectrum ||
                              config.scenario == Scenario::rates;

    if (needs_medium && !sections.count("medium"))
        throw ConfigError("scenario '" + to_string(config.scenario) +
                          "' requires a [medium] section");
    SectionReader medium(sections, "medium");
    if (needs_medium || sections.count("medium")) {
        config.groups = resolve_medium(medium, config);
        record_groups(config);
    }
    medium.finish();

    switch (config.scenario) {
    case Scenario::decay:
    case Scenario::spectrum: {
        SectionReader section(sections, to_string(config.scenario));
        config.rho_aa0 = parse_double("rho_aa0", section.take_or("rho_aa0", "1"));
        config.t_end = parse_double("t_end", section.take("t_end"));
        config.samples = parse_int("samples", section.take_or("samples", "400"));
        if (config.scenario == Scenario::spectrum) {
            config.snapshot_times = parse_list("times", section.take("times"));
            config.span_doppler = parse_double("span_doppler", section.take_or("span_doppler", "6"));
            config.spectrum_points = parse_int("points", section.take_or("points", "241"));
            config.include_shift =
                parse_bool("include_shift", section.take_or("include_shift", "false"));
        }
        section.finish();
        if (!(config.rho_aa0 >= 0.0 && config.rho_aa0 <= 1.0))
            throw ConfigError("rho_aa0 must lie in [0, 1]");
        if (!(config.t_end > 0.0) || config.samples < 2)
            throw ConfigError("need t_end > 0 and samples >= 2");
        break;
    }
    case Scenario::holstein: {
        SectionReader section(sections, "holstein");
        if (section.has("kappa")) {
            config.kappa = parse_double("kappa", section.take("kappa"));
            if (config.has_medium)
                check_consistent("kappa (= eta g)", config.kappa, config.groups.kappa);
        } else if (config.has_medium) {
            config.kappa = config.groups.kappa;
        } else {
            throw ConfigError("[holstein] requires kappa or a [medium] section");
        }
        config.node_count = parse_int("node_count", section.take_or("node_count", "200"));
        config.export_kernel =
            parse_bool("export_kernel", section.take_or("export_kernel", "false"));
        section.finish();
        if (!(config.kappa >= 0.0))
            throw ConfigError("kappa must be >= 0");
        config.resolved.emplace_back("holstein_kappa", format_number(config.kappa));
        config.resolved.emplace_back("holstein_node_count", format_number(config.node_count));
        break;
    }
    case Scenario::bistability: {
        SectionReader section(sections, "bistability");
        config.bistability.cooperativity =
            parse_double("cooperativity", section.take("cooperativity"));
        config.bistability.slab_parameter = parse_double("r", section.take_or("r", "0"));
        config.bistability.gamma_star_ratio =
            parse_double("gamma_star_ratio", section.take_or("gamma_star_ratio", "0"));
        const std::string mode = section.take_or("collective", "off");
        if (mode == "off")
            config.bistability.mode = CollectiveMode::off;
        else if (mode == "explicit-approx" || mode == "explicit")
            config.bistability.mode = CollectiveMode::explicit_approx;
        else if (mode == "fixed-point")
            config.bistability.mode = CollectiveMode::fixed_point;
        else
            throw ConfigError("collective must be off | explicit-approx | fixed-point");
        const double omega_min = parse_double("omega_min", section.take("omega_min"));
        const double omega_max = parse_double("omega_max", section.take("omega_max"));
        const int omega_points = parse_int("omega_points", section.take_or("omega_points", "101"));
        const std::string scale = section.take_or("omega_scale", "linear");
        section.finish();
        if (!(omega_min >= 0.0) || !(omega_max > omega_min) || omega_points < 2)
            throw ConfigError("need 0 <= omega_min < omega_max and omega_points >= 2");
        config.bistability.omega_grid.resize(omega_points);
        for (int i = 0; i < omega_points; ++i) {
            const double f = static_cast<double>(i) / (omega_points - 1);
            if (scale == "linear")
                config.bistability.omega_grid[i] = omega_min + f * (omega_max - omega_min);
            else if (scale == "log") {
                if (!(omega_min > 0.0))
                    throw ConfigError("log omega grid requires omega_min > 0");
                config.bistability.omega_grid[i] =
                    omega_min * std::pow(omega_max / omega_min, f);
            } else {
                throw ConfigError("omega_scale must be linear | log");
            }
        }
        try {
            config.bistability.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("invalid bistability block: ") + e.what());
        }
        config.resolved.emplace_back("cooperativity",
                                     format_number(config.bistability.cooperativity));
        config.resolved.emplace_back("r", format_number(config.bistability.slab_parameter));
        config.resolved.emplace_back("gamma_star_ratio",
                                     format_number(config.bistability.gamma_star_ratio));
        config.resolved.emplace_back("collective", mode);
        break;
    }
    case Scenario::rates: {
        SectionReader section(sections, "rates");
        config.rates_rho_aa = parse_double("rho_aa", section.take("rho_aa"));
        config.span_doppler = parse_double("span_doppler", section.take_or("span_doppler", "6"));
        config.spectrum_points = parse_int("points", section.take_or("points", "241"));
        section.finish();
        if (!(config.rates_rho_aa >= 0.0 && config.rates_rho_aa <= 1.0))
            throw ConfigError("rho_aa must lie in [0, 1]");
        config.resolved.emplace_back("rho_aa", format_number(config.rates_rho_aa));
        break;
    }
    }
    return config;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream file(path);
    if (!file)
        throw ConfigError("cannot open config file: " + path);
    std::stringstream buffer;
    buffer << file.rdbuf();
    return load_run_config_text(buffer.str());
}

} // namespace dense_bloch
