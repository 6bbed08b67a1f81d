#include <doctest.h>

#include <cmath>

#include "dense_bloch/rates.hpp"
#include "dense_bloch/response.hpp"
#include "oracles.hpp"

using namespace dense_bloch;

namespace {
constexpr double kPi = 3.14159265358979323846;

DimensionlessGroups groups_for(double g, double eta, double r = 100.0 * kPi) {
    DimensionlessGroups groups;
    groups.g = g;
    groups.eta = eta;
    groups.kappa = eta * g;
    groups.r = r;
    groups.cooperativity = eta / (4.0 * kPi * r);
    return groups;
}

AtomicState excited(double rho_aa) { return AtomicState{rho_aa, {0.0, 0.0}}; }
} // namespace

TEST_SUITE_BEGIN("rates");

TEST_CASE("small-sample spectral rate closed-form values") {
    const auto groups = groups_for(0.01, 100.0); // kappa = 1
    CHECK(small_sample_rate_spectral(excited(0.0), 0.0, groups) == 0.0);
    // fully inverted at line centre: (1/-1)(1 - e^{+1}) = e - 1
    CHECK(small_sample_rate_spectral(excited(1.0), 0.0, groups) ==
          doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-10));
    // removable singularity: limit rho_aa kappa at rho_aa = 1/2
    CHECK(small_sample_rate_spectral(excited(0.5), 0.0, groups) ==
          doctest::Approx(0.5).epsilon(1e-9));
    const double above = small_sample_rate_spectral(excited(0.5 + 1e-4), 0.0, groups);
    const double below = small_sample_rate_spectral(excited(0.5 - 1e-4), 0.0, groups);
    CHECK(above == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(below == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("small-sample averaged rate against the Romberg oracle") {
    const auto groups = groups_for(0.01, 100.0); // kappa = 1
    const double lib = small_sample_rate_averaged(excited(1.0), groups);
    const double oracle = oracles::averaged_rate(1.0, 1.0);
    CHECK(lib == doctest::Approx(oracle).epsilon(1e-8));
    CHECK(lib == doctest::Approx(1.1017555).epsilon(1e-6)); // frozen oracle value
    CHECK(small_sample_rate_averaged(excited(0.0), groups) == 0.0);
}

TEST_CASE("averaged rate small-K limit at rho_aa = 1/2") {
    const auto groups = groups_for(0.01, 100.0);
    // K = 0 exactly: rho_aa kappa / sqrt(2)
    CHECK(small_sample_rate_averaged(excited(0.5), groups) ==
          doctest::Approx(0.5 / std::sqrt(2.0)).epsilon(1e-9));
    CHECK(small_sample_rate_averaged(excited(0.5), groups) ==
          doctest::Approx(0.3535534).epsilon(1e-6));
}

TEST_CASE("averaged rate equals the Gaussian velocity average of the spectral rate") {
    const auto groups = groups_for(0.01, 500.0); // kappa = 5
    for (double rho : {0.15, 0.5, 0.95}) {
        const double dd = groups.doppler_width();
        const double norm = 1.0 / (std::sqrt(2.0 * kPi) * dd);
        const double averaged = oracles::romberg(
            [&](double delta) {
                return norm * std::exp(-0.5 * delta * delta / (dd * dd)) *
                       small_sample_rate_spectral(excited(rho), delta, groups);
            },
            -9.0 * dd, 9.0 * dd, 1e-12);
        CHECK(small_sample_rate_averaged(excited(rho), groups) ==
              doctest::Approx(averaged).epsilon(1e-8));
    }
}

TEST_CASE("spectral rate is nonnegative for arbitrary physical populations") {
    oracles::Lcg rng(31);
    for (int i = 0; i < 300; ++i) {
        const double eta = rng.uniform(0.0, 1000.0);
        const auto groups = groups_for(0.01, eta);
        const double rho = rng.uniform(0.0, 1.0);
        const double delta = rng.uniform(-5.0, 5.0) * groups.doppler_width();
        CHECK(small_sample_rate_spectral(excited(rho), delta, groups) >= 0.0);
    }
}

TEST_CASE("general volume rate collapses to the closed form for the homogeneous cylinder") {
    const auto groups = groups_for(0.01, 100.0); // kappa = 1
    const AtomicState state = excited(1.0);
    const double depth = groups.r / kPi; // d in wavelengths
    VolumeGrid grid;
    grid.geometry = Geometry::cylinder_on_axis;
    grid.extent = depth;
    grid.node_count = 2048;

    const double delta = 0.0;
    const double ps = doppler_source(state, delta, groups);
    const double q2 = doppler_absorption_coefficient(state, delta, groups).q0_double_prime;
    const double general = general_rate_spectral([ps](double) { return ps; },
                                                 [q2](double) { return q2; }, 0.0, grid, groups);
    CHECK(general ==
          doctest::Approx(small_sample_rate_spectral(state, delta, groups)).epsilon(1e-6));
}

TEST_CASE("general volume rate is linear in disjoint sources at zero absorption") {
    const auto groups = groups_for(0.01, 100.0);
    VolumeGrid grid;
    grid.extent = 10.0;
    grid.node_count = 512;
    const auto shell1 = [](double r) { return 0.7 * std::exp(-(r - 1.5) * (r - 1.5) / 0.08); };
    const auto shell2 = [](double r) { return 1.3 * std::exp(-(r - 5.5) * (r - 5.5) / 0.08); };
    const auto both = [&](double r) { return shell1(r) + shell2(r); };
    const auto zero_absorption = [](double) { return 0.0; };
    const double a = general_rate_spectral(shell1, zero_absorption, 0.0, grid, groups);
    const double b = general_rate_spectral(shell2, zero_absorption, 0.0, grid, groups);
    const double ab = general_rate_spectral(both, zero_absorption, 0.0, grid, groups);
    CHECK(ab == doctest::Approx(a + b).epsilon(1e-12));
    CHECK(general_rate_spectral([](double) { return 0.0; }, zero_absorption, 0.0, grid, groups) ==
          0.0);
}

TEST_CASE("general volume rate reports unresolved grids") {
    const auto groups = groups_for(0.01, 100.0);
    VolumeGrid grid;
    grid.extent = 50.0;
    grid.node_count = 16;
    // absorption oscillating on a scale the grid cannot resolve
    const auto source = [](double r) { return std::cos(9.0 * r) * std::cos(9.0 * r); };
    const auto absorption = [](double r) { return -0.4 - 0.3 * std::sin(7.0 * r); };
    CHECK_THROWS_AS(general_rate_spectral(source, absorption, 0.0, grid, groups),
                    ConvergenceError);
}

TEST_CASE("slab variant of the volume rate rejects amplifying media") {
    const auto groups = groups_for(0.01, 100.0);
    VolumeGrid grid;
    grid.geometry = Geometry::slab;
    grid.extent = 4.0;
    grid.node_count = 256;
    CHECK_THROWS_AS(general_rate_spectral([](double) { return 1.0; },
                                          [](double) { return 0.2; }, 2.0, grid, groups),
                    std::invalid_argument);
    // absorbing slab works and is positive
    const double v = general_rate_spectral([](double) { return 1.0; },
                                           [](double) { return -0.5; }, 2.0, grid, groups);
    CHECK(v > 0.0);
}

TEST_CASE("collective shift reproduces the Lorentzian pair") {
    const auto profile = [](double w) { return 1.0 / (1.0 + w * w); };
    for (double w : {0.5, 1.0, 2.0, 5.0}) {
        const double exact = 0.5 * w / (1.0 + w * w);
        CHECK(collective_shift(profile, w, 400.0) == doctest::Approx(exact).epsilon(1e-3));
    }
    CHECK(std::abs(collective_shift(profile, 0.0, 400.0)) < 1e-9);
}

TEST_CASE("collective shift parity, nullity and linearity") {
    const auto even_profile = [](double w) { return std::exp(-0.5 * w * w); };
    const double plus = collective_shift(even_profile, 1.2, 60.0);
    const double minus = collective_shift(even_profile, -1.2, 60.0);
    CHECK(plus == doctest::Approx(-minus).epsilon(1e-9));
    CHECK(collective_shift([](double) { return 0.0; }, 0.7, 60.0) == 0.0);

    const auto p1 = [](double w) { return 1.0 / (1.0 + w * w); };
    const auto p2 = [](double w) { return std::exp(-0.25 * w * w); };
    const auto combo = [&](double w) { return 2.0 * p1(w) - 0.5 * p2(w); };
    const double lhs = collective_shift(combo, 0.9, 80.0);
    const double rhs =
        2.0 * collective_shift(p1, 0.9, 80.0) - 0.5 * collective_shift(p2, 0.9, 80.0);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-7));
}

TEST_CASE("shift profile warns about narrow grids") {
    const auto groups = groups_for(0.01, 100.0);
    const double dd = groups.doppler_width();
    Warnings narrow;
    shift_profile(excited(0.5), groups, {-dd, 0.0, dd}, &narrow);
    CHECK_FALSE(narrow.empty());
}

TEST_CASE("linear-limit rate agrees with the averaged rate to first order") {
    const auto groups = groups_for(0.01, 100.0); // kappa = 1
    VolumeGrid grid;
    grid.geometry = Geometry::cylinder_on_axis;
    grid.extent = groups.r / kPi;
    grid.node_count = 1024;
    const double eps = 1e-3;
    const double linear =
        linear_limit_rate([eps](double) { return eps; }, groups, grid) / eps;
    const double small_sample = small_sample_rate_averaged(excited(eps), groups) / eps;
    CHECK(linear == doctest::Approx(small_sample).epsilon(0.01));
    const double j1 = oracles::trapping_capture(1.0);
    CHECK(linear == doctest::Approx(j1).epsilon(0.01));
    CHECK(linear_limit_rate([](double) { return 0.0; }, groups, grid) == 0.0);
}

TEST_CASE("linear-limit rate is linear in the excitation field") {
    const auto groups = groups_for(0.01, 500.0);
    VolumeGrid grid;
    grid.extent = groups.r / kPi;
    grid.node_count = 512;
    const auto f1 = [&](double r) { return 1e-3 * (1.0 + r / grid.extent); };
    const auto f2 = [&](double r) { return 5e-4 * std::exp(-r); };
    const double a = linear_limit_rate(f1, groups, grid);
    const double b = linear_limit_rate(f2, groups, grid);
    const double ab = linear_limit_rate([&](double r) { return f1(r) + f2(r); }, groups, grid);
    CHECK(ab == doctest::Approx(a + b).epsilon(1e-10));
}

TEST_SUITE_END();
