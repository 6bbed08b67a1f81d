#include <doctest.h>

#include <cmath>

#include "dense_bloch/dynamics.hpp"
#include "oracles.hpp"

using namespace dense_bloch;

namespace {
constexpr double kPi = 3.14159265358979323846;

DimensionlessGroups groups_for(double g, double eta) {
    DimensionlessGroups groups;
    groups.g = g;
    groups.eta = eta;
    groups.kappa = eta * g;
    groups.r = 100.0 * kPi;
    groups.cooperativity = eta / (4.0 * kPi * groups.r);
    return groups;
}

AtomicState inverted() { return AtomicState{1.0, {0.0, 0.0}}; }
} // namespace

TEST_SUITE_BEGIN("dynamics");

TEST_CASE("free-space limit decays exponentially") {
    const auto groups = groups_for(0.01, 0.0); // eta = 0 -> kappa = 0
    const auto traj = evolve_two_level(inverted(), groups, 20.0, 201);
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        CHECK(std::abs(traj.rho_aa[i] - std::exp(-traj.times[i])) < 1e-8);
        CHECK(traj.gamma_eff[i] == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK_FALSE(traj.markov_flag);
}

TEST_CASE("initial effective rate shows amplified spontaneous emission") {
    const auto groups = groups_for(0.01, 100.0); // kappa = 1
    const auto traj = evolve_two_level(inverted(), groups, 5.0, 101);
    const double gamma0 = oracles::averaged_rate(1.0, 1.0);
    CHECK(traj.gamma_avg[0] == doctest::Approx(gamma0).epsilon(1e-6));
    // Gamma_eff(0) = gamma + 2 Gamma - Gamma / rho_aa = gamma + Gamma at rho_aa = 1
    CHECK(traj.gamma_eff[0] == doctest::Approx(1.0 + gamma0).epsilon(1e-9));
    CHECK(traj.gamma_eff[0] > 1.0);
}

TEST_CASE("late-time effective rate approaches the linearized trapping value") {
    const auto groups = groups_for(0.01, 100.0);
    const auto traj = evolve_two_level(inverted(), groups, 25.0, 251);
    CHECK(traj.rho_aa.back() < 0.01);
    const double expected = 1.0 - oracles::trapping_capture(1.0);
    CHECK(traj.gamma_eff.back() == doctest::Approx(expected).epsilon(0.05));
}

TEST_CASE("population decreases monotonically and stays physical") {
    const auto groups = groups_for(0.01, 500.0);
    const auto traj = evolve_two_level(inverted(), groups, 3.0, 151);
    for (std::size_t i = 1; i < traj.rho_aa.size(); ++i) {
        CHECK(traj.rho_aa[i] <= traj.rho_aa[i - 1] + 1e-12);
        CHECK(traj.rho_aa[i] >= -1e-12);
        CHECK(traj.gamma_eff[i] > 0.0);
    }
}

TEST_CASE("Markov guard flags only the superradiant regime") {
    const auto dense = groups_for(0.01, 500.0); // kappa = 5
    const auto traj = evolve_two_level(inverted(), dense, 1.0, 51);
    const double doppler = dense.doppler_width();
    CHECK(traj.max_gamma == doctest::Approx(oracles::averaged_rate(1.0, 5.0)).epsilon(1e-4));
    CHECK(traj.max_gamma > 0.5 * doppler);
    CHECK(traj.markov_flag);

    const auto dilute = groups_for(0.01, 100.0); // kappa = 1, Gamma(0) ~ 1.1 gamma
    const auto traj2 = evolve_two_level(inverted(), dilute, 1.0, 51);
    CHECK(traj2.max_gamma < 0.5 * doppler);
    CHECK_FALSE(traj2.markov_flag);
}

TEST_CASE("effective_rate matches the stored series and reports truncation") {
    const auto groups = groups_for(0.01, 100.0);
    const auto traj = evolve_two_level(inverted(), groups, 5.0, 51);
    const auto rates = effective_rate(traj);
    REQUIRE(rates.size() == traj.gamma_eff.size());
    for (std::size_t i = 0; i < rates.size(); ++i)
        CHECK(rates[i] == doctest::Approx(traj.gamma_eff[i]).epsilon(1e-12));

    DecayTrajectory truncated = traj;
    truncated.rho_aa.back() = 1e-14;
    CHECK_THROWS_AS(effective_rate(truncated), std::runtime_error);
}

TEST_CASE("spectrum snapshot reduces to the Doppler profile at low opacity") {
    const auto groups = groups_for(0.01, 1e-6);
    AtomicState state;
    state.rho_aa = 0.3;
    std::vector<double> grid;
    for (int i = 0; i <= 80; ++i)
        grid.push_back(-4.0 + 8.0 * i / 80.0);
    const auto snap = spectrum_snapshot(state, groups, grid);
    const std::size_t centre = 40;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double expected = std::exp(-0.5 * grid[i] * grid[i]);
        CHECK(snap.profile[i] / snap.profile[centre] == doctest::Approx(expected).epsilon(1e-6));
    }
}

TEST_CASE("spectrum snapshot is unit-normalized against the velocity distribution") {
    const auto groups = groups_for(0.01, 500.0);
    AtomicState state;
    state.rho_aa = 0.8;
    std::vector<double> grid;
    for (int i = 0; i <= 600; ++i)
        grid.push_back(-6.0 + 12.0 * i / 600.0);
    const auto snap = spectrum_snapshot(state, groups, grid);
    // trapezoid of W(x) * profile over the grid, x in Doppler units
    double integral = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double w0 = std::exp(-0.5 * grid[i - 1] * grid[i - 1]) / std::sqrt(2.0 * kPi);
        const double w1 = std::exp(-0.5 * grid[i] * grid[i]) / std::sqrt(2.0 * kPi);
        integral += 0.5 * (w0 * snap.profile[i - 1] + w1 * snap.profile[i]) * (grid[i] - grid[i - 1]);
    }
    CHECK(integral == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("spectral condensation: narrow while inverted, broad once depleted") {
    const auto groups = groups_for(0.01, 500.0); // kappa = 5
    std::vector<double> grid;
    for (int i = 0; i <= 400; ++i)
        grid.push_back(-5.0 + 10.0 * i / 400.0);
    const double doppler_fwhm = 2.0 * std::sqrt(2.0 * std::log(2.0));

    AtomicState hot;
    hot.rho_aa = 0.999;
    const auto narrow = spectrum_snapshot(hot, groups, grid);
    CHECK(profile_fwhm(grid, narrow.profile) < doppler_fwhm);

    AtomicState cold;
    cold.rho_aa = 0.05;
    const auto broad = spectrum_snapshot(cold, groups, grid);
    CHECK(profile_fwhm(grid, broad.profile) > doppler_fwhm);
}

TEST_CASE("snapshot span warning") {
    const auto groups = groups_for(0.01, 100.0);
    AtomicState state;
    state.rho_aa = 0.4;
    Warnings warnings;
    spectrum_snapshot(state, groups, {-1.0, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75, 1.0}, &warnings);
    CHECK_FALSE(warnings.empty());
}

TEST_CASE("trajectories depend on parameters only through the dimensionless groups") {
    MediumParameters a;
    a.atom_density = 1e18;
    a.transition_wavelength = 1e-6;
    a.radiative_rate = 1e7;
    a.doppler_width = 1e7 / (std::sqrt(2.0 * kPi) * 0.01);
    a.sample_length = 1e-4;
    // power-of-two rescaling keeps every group bitwise identical
    MediumParameters b = a;
    b.transition_wavelength *= 2.0;
    b.atom_density /= 8.0;
    b.sample_length *= 2.0;
    b.radiative_rate *= 4.0;
    b.doppler_width *= 4.0;

    const auto ga = derive_groups(a);
    const auto gb = derive_groups(b);
    REQUIRE(ga.eta == gb.eta);
    REQUIRE(ga.g == gb.g);
    REQUIRE(ga.kappa == gb.kappa);

    const auto ta = evolve_two_level(inverted(), ga, 5.0, 41);
    const auto tb = evolve_two_level(inverted(), gb, 5.0, 41);
    for (std::size_t i = 0; i < ta.times.size(); ++i) {
        CHECK(ta.rho_aa[i] == tb.rho_aa[i]); // bitwise
        CHECK(ta.gamma_avg[i] == tb.gamma_avg[i]);
    }
}

TEST_CASE("snapshots are attached at the requested times") {
    const auto groups = groups_for(0.01, 500.0);
    std::vector<double> grid;
    for (int i = 0; i <= 100; ++i)
        grid.push_back(-5.0 + 10.0 * i / 100.0);
    const auto traj = evolve_two_level(inverted(), groups, 4.0, 81, DecayControls{},
                                       {0.0, 1.0, 4.0}, grid);
    REQUIRE(traj.snapshots.size() == 3);
    CHECK(traj.snapshots[0].time == doctest::Approx(0.0));
    CHECK(traj.snapshots[1].time == doctest::Approx(1.0));
    CHECK(traj.snapshots[2].time == doctest::Approx(4.0));
    CHECK(traj.snapshots[0].rho_aa == doctest::Approx(1.0));
}

TEST_SUITE_END();
