#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dense_bloch/config.hpp"
#include "dense_bloch/scenarios.hpp"

using namespace dense_bloch;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    REQUIRE(file.good());
    std::stringstream ss;
    ss << file.rdbuf();
    return ss.str();
}

std::string temp_dir(const std::string& tag) {
    const auto dir = std::filesystem::temp_directory_path() / ("dense_bloch_test_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir.string();
}

const char* kDecayConfig = R"(
[run]
scenario = decay
[medium]
eta = 10
g = 0.01
[decay]
rho_aa0 = 1
t_end = 5
samples = 50
)";

} // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("config parsing accepts the documented format") {
    const RunConfig config = load_run_config_text(kDecayConfig);
    CHECK(config.scenario == Scenario::decay);
    CHECK(config.groups.eta == 10.0);
    CHECK(config.groups.g == 0.01);
    CHECK(config.groups.kappa == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(config.t_end == 5.0);
    CHECK(config.samples == 50);
}

TEST_CASE("missing keys are reported by name") {
    const char* text = R"(
[run]
scenario = decay
[medium]
g = 0.01
[decay]
t_end = 5
)";
    try {
        load_run_config_text(text);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("eta") != std::string::npos);
    }
}

TEST_CASE("unknown keys and sections are rejected") {
    CHECK_THROWS_AS(load_run_config_text("[run]\nscenario = decay\nbogus = 1\n"
                                         "[medium]\neta = 1\ng = 0.01\n[decay]\nt_end = 1\n"),
                    ConfigError);
    CHECK_THROWS_AS(load_run_config_text("[run]\nscenario = decay\n[mystery]\nx = 1\n"
                                         "[medium]\neta = 1\ng = 0.01\n[decay]\nt_end = 1\n"),
                    ConfigError);
    CHECK_THROWS_AS(load_run_config_text("[run]\nscenario = decay\n[medium]\neta = 1\neta = 2\n"),
                    ConfigError);
}

TEST_CASE("redundant medium specifications must be consistent") {
    const char* consistent = R"(
[run]
scenario = decay
[medium]
eta = 100
g = 0.01
atom_density = 1e18
wavelength = 1e-6
sample_length = 1e-4
radiative_rate = 1e7
doppler_width = 3.989422804014327e+08
[decay]
t_end = 1
)";
    const RunConfig ok = load_run_config_text(consistent);
    CHECK(ok.groups.eta == doctest::Approx(100.0).epsilon(1e-12));

    const char* inconsistent = R"(
[run]
scenario = decay
[medium]
eta = 90
g = 0.01
atom_density = 1e18
wavelength = 1e-6
sample_length = 1e-4
radiative_rate = 1e7
doppler_width = 3.989422804014327e+08
[decay]
t_end = 1
)";
    CHECK_THROWS_AS(load_run_config_text(inconsistent), ConfigError);
}

TEST_CASE("kappa cross-check against eta * g") {
    const char* bad = R"(
[run]
scenario = holstein
[medium]
eta = 100
g = 0.01
kappa = 2.0
[holstein]
node_count = 64
)";
    CHECK_THROWS_AS(load_run_config_text(bad), ConfigError);
}

TEST_CASE("decay scenario writes the documented columns deterministically") {
    RunConfig config = load_run_config_text(kDecayConfig);
    config.out_dir = temp_dir("decay");
    const RunResult result = run_scenario(config);
    CHECK(result.exit_code == 0);
    REQUIRE(result.output_files.size() == 1);
    const std::string first = slurp(result.output_files[0]);
    CHECK(first.find("t,rho_aa,Gamma_over_gamma,Gamma_eff_over_gamma\n") != std::string::npos);
    CHECK(first.find("# scenario = decay") != std::string::npos);
    CHECK(first.find("# eta = 10") != std::string::npos);
    CHECK(first.find('\r') == std::string::npos); // LF endings

    // byte-identical re-run
    run_scenario(config);
    CHECK(slurp(result.output_files[0]) == first);
}

TEST_CASE("equal dimensionless groups give byte-identical outputs") {
    const char* si_a = R"(
[run]
scenario = decay
[medium]
atom_density = 1e18
wavelength = 1e-6
sample_length = 1e-4
radiative_rate = 1e7
doppler_width = 3.989422804014327e+08
[decay]
t_end = 3
samples = 40
)";
    // powers-of-two rescaling of the same groups
    const char* si_b = R"(
[run]
scenario = decay
[medium]
atom_density = 1.25e17
wavelength = 2e-6
sample_length = 2e-4
radiative_rate = 4e7
doppler_width = 1.5957691216057307e+09
[decay]
t_end = 3
samples = 40
)";
    RunConfig ca = load_run_config_text(si_a);
    RunConfig cb = load_run_config_text(si_b);
    REQUIRE(ca.groups.eta == cb.groups.eta);
    REQUIRE(ca.groups.g == cb.groups.g);
    ca.out_dir = temp_dir("group_a");
    cb.out_dir = temp_dir("group_b");
    const auto ra = run_scenario(ca);
    const auto rb = run_scenario(cb);
    CHECK(slurp(ra.output_files[0]) == slurp(rb.output_files[0]));
}

TEST_CASE("bistability scenario emits the branch table") {
    const char* text = R"(
[run]
scenario = bistability
[bistability]
cooperativity = 5
collective = off
omega_min = 1.0
omega_max = 2.2
omega_points = 13
)";
    RunConfig config = load_run_config_text(text);
    config.out_dir = temp_dir("bist");
    const RunResult result = run_scenario(config);
    CHECK(result.exit_code == 0);
    const std::string csv = slurp(result.output_files[0]);
    CHECK(csv.find("Omega_over_gamma,branch_id,rho_aa,stable\n") != std::string::npos);
}

TEST_CASE("holstein scenario emits the escape-rate row") {
    const char* text = R"(
[run]
scenario = holstein
[holstein]
kappa = 100
node_count = 96
)";
    RunConfig config = load_run_config_text(text);
    config.out_dir = temp_dir("holstein");
    const RunResult result = run_scenario(config);
    CHECK(result.exit_code == 0);
    const std::string csv = slurp(result.output_files[0]);
    CHECK(csv.find("gamma_esc_numeric,gamma_esc_asymptotic\n") != std::string::npos);
    // exactly one data row
    const auto header_pos = csv.find("gamma_esc_numeric");
    const std::string data = csv.substr(csv.find('\n', header_pos) + 1);
    CHECK(std::count(data.begin(), data.end(), '\n') == 1);
}

TEST_CASE("rates scenario reports the averaged rate in the header") {
    const char* text = R"(
[run]
scenario = rates
[medium]
eta = 100
g = 0.01
[rates]
rho_aa = 1
points = 41
)";
    RunConfig config = load_run_config_text(text);
    config.out_dir = temp_dir("rates");
    const RunResult result = run_scenario(config);
    CHECK(result.exit_code == 0);
    const std::string csv = slurp(result.output_files[0]);
    CHECK(csv.find("# gamma_avg_over_gamma = 1.1017") != std::string::npos);
}

TEST_CASE("markov flag maps to exit code 4") {
    const char* text = R"(
[run]
scenario = decay
[medium]
eta = 500
g = 0.01
[decay]
t_end = 0.5
samples = 20
)";
    RunConfig config = load_run_config_text(text);
    config.out_dir = temp_dir("markov");
    const RunResult result = run_scenario(config);
    CHECK(result.exit_code == 4);
    CHECK_FALSE(result.warnings.empty());
}

TEST_CASE("validator reports the resolved groups") {
    const RunConfig config = load_run_config_text(kDecayConfig);
    const std::string report = validate_report(config);
    CHECK(report.find("kappa = 0.1") != std::string::npos);
    CHECK(report.find("eta   = 10") != std::string::npos);
}

TEST_CASE("spectrum scenario carries snapshots") {
    const char* text = R"(
[run]
scenario = spectrum
[medium]
eta = 100
g = 0.01
[spectrum]
t_end = 2
samples = 41
times = 0, 1, 2
points = 41
span_doppler = 5
)";
    RunConfig config = load_run_config_text(text);
    config.out_dir = temp_dir("spectrum");
    const RunResult result = run_scenario(config);
    CHECK(result.exit_code == 0);
    const std::string csv = slurp(result.output_files[0]);
    CHECK(csv.find("t,rho_aa,delta_over_doppler,profile\n") != std::string::npos);
}

TEST_SUITE_END();
