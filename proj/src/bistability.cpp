#include "dense_bloch/bistability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dense_bloch/numerics.hpp"
#include "dense_bloch/parallel.hpp"
#include "dense_bloch/response.hpp"

namespace dense_bloch {

namespace {

constexpr double kStateTol = 1e-9;

double phi(double x) {
    if (std::abs(x) < 1e-6)
        return 1.0 - 0.5 * x + x * x / 6.0;
    return -std::expm1(-x) / x;
}

struct RateConstants {
    double c = 0;  // cooperativity
    double r = 0;  // pi d / lambda
    double gs = 0; // gamma*/gamma

    double gamma_ab(double big_gamma) const { return big_gamma + 0.5 * (1.0 + gs); }
    double gamma_a(double big_gamma) const { return 1.0 + gs + big_gamma; }
};

RateConstants constants(const BistabilityConfig& config) {
    return {config.cooperativity, config.slab_parameter, config.gamma_star_ratio};
}

// Population-difference cubic in w_bar = rho_bb - rho_aa for frozen Gamma:
//   [-(1+gs) + 2 Gab w] (Gab^2 + C^2 w^2) + 4 Om^2 Gab w = 0.
struct Cubic {
    double a3, a2, a1, a0;
    double operator()(double w) const { return ((a3 * w + a2) * w + a1) * w + a0; }
    double scale() const { return std::max({std::abs(a3), std::abs(a2), std::abs(a1), std::abs(a0)}); }
};

Cubic population_cubic(double omega, double big_gamma, const RateConstants& k) {
    const double gab = k.gamma_ab(big_gamma);
    const double c2 = k.c * k.c;
    return {2.0 * gab * c2, -(1.0 + k.gs) * c2, 2.0 * gab * gab * gab + 4.0 * omega * omega * gab,
            -(1.0 + k.gs) * gab * gab};
}

std::complex<double> reconstruct_coherence(double w_bar, double omega, double big_gamma,
                                           const RateConstants& k) {
    // rho_ab = -i Om w / (Gab + i C w), w = -w_bar
    const std::complex<double> i{0.0, 1.0};
    const double w = -w_bar;
    return -i * omega * w / (k.gamma_ab(big_gamma) + i * k.c * w);
}

AtomicState reconstruct_state(double w_bar, double omega, double big_gamma,
                              const RateConstants& k) {
    AtomicState s;
    s.rho_aa = 0.5 * (1.0 - w_bar);
    s.rho_ab = reconstruct_coherence(w_bar, omega, big_gamma, k);
    return s;
}

double explicit_rate(double rho_aa, double omega, const RateConstants& k) {
    const double s = 1.0 - 2.0 * rho_aa;
    // K = 4 C r s^2 (1+gs*s) / [8 Om^2 s^2 + 8 C^2 s^4 + (1+gs*s)^2]
    const double gsfac = 1.0 + k.gs * s;
    const double denom =
        8.0 * omega * omega * s * s + 8.0 * k.c * k.c * s * s * s * s + gsfac * gsfac;
    const double big_k = 4.0 * k.c * k.r * s * s * gsfac / denom;
    const double k_over_s = 4.0 * k.c * k.r * s * gsfac / denom;
    return rho_aa * k_over_s * phi(big_k);
}

// One evaluation of the right-hand side of the implicit rate relation,
// assembled from the driven response and source of the medium:
//   Gamma/gamma = pi C P^s int_0^d e^{2 q0'' r} dr = C r P^s phi(-2 q0'' d).
double rate_relation(double big_gamma, const AtomicState& state, double omega,
                     const RateConstants& k) {
    const double gab = k.gamma_ab(big_gamma);
    const std::complex<double> local_rabi = omega + k.c * state.rho_ab;
    const double source = driven_source_resonance(state, local_rabi, gab);
    DimensionlessGroups groups;
    groups.cooperativity = k.c;
    const double q2 =
        driven_absorption_coefficient(state, local_rabi, gab, groups).q0_double_prime;
    constexpr double pi = 3.14159265358979323846;
    const double depth = k.r / pi; // d in wavelengths
    // amplifying transients can drive the gain exponent past the range of
    // exp; the clamp keeps the iteration finite, and the growing Gamma_ab
    // pulls the fixed point back into range
    const double gain = std::clamp(-2.0 * q2 * depth, -700.0, std::numeric_limits<double>::max());
    return k.c * k.r * source * phi(gain);
}

double damped_fixed_point(const std::function<double(double)>& f, double seed, double residual_tol,
                          const char* what) {
    double x = std::max(0.0, seed);
    double damping = 0.5;
    double prev_update = 0.0;
    double residual = 0.0;
    for (int it = 0; it < 200000; ++it) {
        const double fx = std::max(0.0, f(x));
        residual = fx - x;
        if (std::abs(residual) <= residual_tol * std::max(1.0, std::abs(x)))
            return x;
        if (it > 0 && residual * prev_update < 0.0)
            damping = std::max(0.01, 0.5 * damping); // oscillation: damp harder
        prev_update = residual;
        x += damping * residual;
    }
    throw ConvergenceError(std::string(what) + ": fixed point not converged, residual " +
                           std::to_string(residual));
}

// Collective rate at a point of the joint (state, Gamma) system. The
// coherence is re-derived from (w_bar, Gamma) inside the loop.
double joint_rate(double w_bar, double omega, const BistabilityConfig& config, double seed) {
    const RateConstants k = constants(config);
    switch (config.mode) {
    case CollectiveMode::off:
        return 0.0;
    case CollectiveMode::explicit_approx: {
        const double rho_aa = 0.5 * (1.0 - w_bar);
        if (rho_aa <= 0.5)
            return explicit_rate(rho_aa, omega, k);
        // outside the derivation domain of the explicit form
        return damped_fixed_point(
            [&](double g) { return rate_relation(g, reconstruct_state(w_bar, omega, g, k), omega, k); },
            seed, 1e-10, "joint_rate");
    }
    case CollectiveMode::fixed_point:
        return damped_fixed_point(
            [&](double g) { return rate_relation(g, reconstruct_state(w_bar, omega, g, k), omega, k); },
            seed, 1e-10, "joint_rate");
    }
    return 0.0;
}

struct JointSolution {
    double w_bar = 0;
    double gamma = 0;
};

// All joint solutions at a fixed drive: scan the population difference for
// sign changes of the cubic residual evaluated with the self-consistent rate,
// then polish each bracket by alternating cubic roots and rate updates.
std::vector<JointSolution> solve_at_omega(double omega, const BistabilityConfig& config) {
    const RateConstants k = constants(config);
    std::vector<JointSolution> found;

    if (config.mode == CollectiveMode::off) {
        const Cubic cubic = population_cubic(omega, 0.0, k);
        for (double w : solve_cubic_real(cubic.a3, cubic.a2, cubic.a1, cubic.a0))
            if (w >= -1.0 - 1e-12 && w <= 1.0 + 1e-12)
                found.push_back({std::clamp(w, -1.0, 1.0), 0.0});
        return found;
    }

    const int scan_points = 2400;
    double gamma_seed = 0.0;
    const auto residual = [&](double w, double& gamma_out) {
        gamma_out = joint_rate(w, omega, config, gamma_seed);
        return population_cubic(omega, gamma_out, k)(w);
    };

    double w_prev = 1e-9;
    double g_prev = 0.0;
    double r_prev = residual(w_prev, g_prev);
    gamma_seed = g_prev;
    for (int i = 1; i <= scan_points; ++i) {
        const double w = static_cast<double>(i) / scan_points * (1.0 - 2e-9) + 1e-9;
        double g = 0.0;
        const double r = residual(w, g);
        if (r_prev == 0.0 || r * r_prev < 0.0) {
            // Bracketed root; Brent on the joint residual.
            const double w_root = find_root_bracketed(
                [&](double x) {
                    double gx = 0.0;
                    return residual(x, gx);
                },
                w_prev, w, 1e-13);
            const double g_root = joint_rate(w_root, omega, config, gamma_seed);
            const auto scaled_residual = [&](double wv, double gv) {
                const Cubic cubic = population_cubic(omega, gv, k);
                return std::abs(cubic(wv)) / cubic.scale();
            };

            // Alternation polish: cubic roots for frozen Gamma, rate update.
            double wb = w_root;
            double gamma = g_root;
            for (int it = 0; it < 200; ++it) {
                const Cubic cubic = population_cubic(omega, gamma, k);
                const auto roots = solve_cubic_real(cubic.a3, cubic.a2, cubic.a1, cubic.a0);
                if (roots.empty())
                    break;
                double nearest = roots.front();
                for (double root : roots)
                    if (std::abs(root - wb) < std::abs(nearest - wb))
                        nearest = root;
                const double gamma_next = joint_rate(nearest, omega, config, gamma);
                const double dw = std::abs(nearest - wb);
                const double dg = std::abs(gamma_next - gamma);
                wb = nearest;
                gamma = 0.5 * (gamma + gamma_next);
                if (dw < 1e-12 && dg < 1e-9) {
                    gamma = gamma_next;
                    break;
                }
            }
            // keep whichever of the scan root and the polished point actually
            // satisfies the stationarity residual better
            if (scaled_residual(wb, gamma) > scaled_residual(w_root, g_root)) {
                wb = w_root;
                gamma = g_root;
            }
            if (wb > 0.0 && wb <= 1.0 + 1e-12)
                found.push_back({std::min(wb, 1.0), gamma});
        }
        w_prev = w;
        r_prev = r;
        gamma_seed = g;
    }

    // Deduplicate brackets that converged to the same solution.
    std::sort(found.begin(), found.end(),
              [](const JointSolution& a, const JointSolution& b) { return a.w_bar < b.w_bar; });
    std::vector<JointSolution> unique;
    for (const auto& s : found)
        if (unique.empty() || std::abs(s.w_bar - unique.back().w_bar) > 1e-7)
            unique.push_back(s);
    return unique;
}

std::vector<BranchPoint> assemble_points(double omega, const std::vector<JointSolution>& sols,
                                         const BistabilityConfig& config) {
    const RateConstants k = constants(config);
    std::vector<BranchPoint> points;
    for (const auto& s : sols) {
        BranchPoint p;
        p.omega = omega;
        p.gamma_collective = s.gamma;
        const AtomicState state = reconstruct_state(s.w_bar, omega, s.gamma, k);
        p.rho_aa = state.rho_aa;
        p.rho_ab = state.rho_ab;
        if (!state.is_physical(kStateTol))
            continue; // spurious root: reconstructed density matrix not positive
        points.push_back(p);
    }
    std::sort(points.begin(), points.end(),
              [](const BranchPoint& a, const BranchPoint& b) { return a.rho_aa < b.rho_aa; });
    for (std::size_t i = 0; i < points.size(); ++i) {
        points[i].branch_id = static_cast<int>(i);
        points[i].stable = classify_stability(points[i], config);
    }
    return points;
}

// Right-hand side of the driven Bloch system in (rho_aa, Re rho_ab, Im rho_ab)
// with the collective rate supplied by the caller.
void bloch_rhs(const std::vector<double>& y, double omega, double big_gamma,
               const RateConstants& k, std::vector<double>& dydt) {
    const double rho_aa = y[0], u = y[1], v = y[2];
    const double w = 2.0 * rho_aa - 1.0;
    const double gab = k.gamma_ab(big_gamma);
    dydt[0] = big_gamma - (k.gamma_a(big_gamma) + big_gamma) * rho_aa + 2.0 * omega * v;
    dydt[1] = -gab * u + k.c * w * v;
    dydt[2] = -gab * v - (omega + k.c * u) * w;
}

double dynamic_rate(const std::vector<double>& y, double omega, const BistabilityConfig& config,
                    double seed) {
    if (config.mode == CollectiveMode::off)
        return 0.0;
    const RateConstants k = constants(config);
    AtomicState state;
    state.rho_aa = std::clamp(y[0], 0.0, 1.0);
    state.rho_ab = {y[1], y[2]};
    if (config.mode == CollectiveMode::explicit_approx && state.rho_aa <= 0.5)
        return explicit_rate(state.rho_aa, omega, k);
    return damped_fixed_point(
        [&](double g) { return rate_relation(g, state, omega, k); }, seed, 1e-10, "dynamic_rate");
}

} // namespace

void BistabilityConfig::validate() const {
    if (!(cooperativity >= 0.0) || !(slab_parameter >= 0.0) || !(gamma_star_ratio >= 0.0))
        throw std::invalid_argument("BistabilityConfig: C, r and gamma*/gamma must be >= 0");
    for (double omega : omega_grid)
        if (!(omega >= 0.0) || !std::isfinite(omega))
            throw std::invalid_argument("BistabilityConfig: omega grid must be finite and >= 0");
}

std::vector<BranchPoint> stationary_branches(const BistabilityConfig& config) {
    config.validate();
    BistabilityConfig off = config;
    off.mode = CollectiveMode::off;
    std::vector<std::vector<BranchPoint>> per_omega(off.omega_grid.size());
    parallel_for(static_cast<int>(off.omega_grid.size()), [&](int i) {
        per_omega[i] = assemble_points(off.omega_grid[i], solve_at_omega(off.omega_grid[i], off), off);
    });
    std::vector<BranchPoint> all;
    for (auto& pts : per_omega)
        all.insert(all.end(), pts.begin(), pts.end());
    return all;
}

double collective_rate_explicit(double rho_aa, double omega, const BistabilityConfig& config) {
    config.validate();
    if (rho_aa < 0.0 || rho_aa > 0.5)
        throw std::domain_error(
            "collective_rate_explicit: valid for absorbing stationary states, rho_aa in [0, 1/2]");
    return explicit_rate(rho_aa, omega, constants(config));
}

double collective_rate_fixed_point(const AtomicState& state, double omega,
                                   const BistabilityConfig& config, double gamma_seed) {
    config.validate();
    state.validate();
    const RateConstants k = constants(config);
    return damped_fixed_point(
        [&](double g) { return rate_relation(g, state, omega, k); }, gamma_seed, 1e-10,
        "collective_rate_fixed_point");
}

std::vector<BranchPoint> self_consistent_branches(const BistabilityConfig& config) {
    config.validate();
    if (config.mode == CollectiveMode::off)
        return stationary_branches(config);
    std::vector<std::vector<BranchPoint>> per_omega(config.omega_grid.size());
    parallel_for(static_cast<int>(config.omega_grid.size()), [&](int i) {
        per_omega[i] =
            assemble_points(config.omega_grid[i], solve_at_omega(config.omega_grid[i], config), config);
    });
    std::vector<BranchPoint> all;
    for (auto& pts : per_omega)
        all.insert(all.end(), pts.begin(), pts.end());
    return all;
}

namespace {

bool routh_hurwitz_stable(const double j[3][3]) {
    const double trace = j[0][0] + j[1][1] + j[2][2];
    const double minors = (j[0][0] * j[1][1] - j[0][1] * j[1][0]) +
                          (j[0][0] * j[2][2] - j[0][2] * j[2][0]) +
                          (j[1][1] * j[2][2] - j[1][2] * j[2][1]);
    const double det = j[0][0] * (j[1][1] * j[2][2] - j[1][2] * j[2][1]) -
                       j[0][1] * (j[1][0] * j[2][2] - j[1][2] * j[2][0]) +
                       j[0][2] * (j[1][0] * j[2][1] - j[1][1] * j[2][0]);
    // lambda^3 + c2 lambda^2 + c1 lambda + c0 with Routh-Hurwitz stability test
    const double c2 = -trace;
    const double c1 = minors;
    const double c0 = -det;
    return c2 > 0.0 && c0 > 0.0 && c2 * c1 > c0;
}

} // namespace

bool classify_stability(const BranchPoint& point, const BistabilityConfig& config) {
    const RateConstants k = constants(config);
    const double omega = point.omega;

    if (config.mode == CollectiveMode::off) {
        const double big_gamma = point.gamma_collective;
        const double gab = k.gamma_ab(big_gamma);
        const double ga = k.gamma_a(big_gamma);
        const double w = 2.0 * point.rho_aa - 1.0;
        const double u = point.rho_ab.real();
        const double v = point.rho_ab.imag();
        const double j[3][3] = {
            {-(ga + big_gamma), 0.0, 2.0 * omega},
            {2.0 * k.c * v, -gab, k.c * w},
            {-2.0 * (omega + k.c * u), -k.c * w, -gab},
        };
        return routh_hurwitz_stable(j);
    }

    // With collective decay the rate responds to the state on the atomic
    // timescale, so the linearization must carry dGamma/dstate along; a
    // frozen-rate Jacobian misses the feedback that destabilizes the middle
    // branch. Central differences of the full right-hand side.
    std::vector<double> x{point.rho_aa, point.rho_ab.real(), point.rho_ab.imag()};
    std::vector<double> fp(3), fm(3), y(3);
    double j[3][3];
    const double h = 1e-7;
    for (int col = 0; col < 3; ++col) {
        y = x;
        y[col] += h;
        const double gp = dynamic_rate(y, omega, config, point.gamma_collective);
        bloch_rhs(y, omega, gp, k, fp);
        y = x;
        y[col] -= h;
        const double gm = dynamic_rate(y, omega, config, point.gamma_collective);
        bloch_rhs(y, omega, gm, k, fm);
        for (int row = 0; row < 3; ++row)
            j[row][col] = (fp[row] - fm[row]) / (2.0 * h);
    }
    return routh_hurwitz_stable(j);
}

double stationarity_jacobian_determinant(const BranchPoint& point, const BistabilityConfig& config,
                                         bool chain_gamma) {
    const RateConstants k = constants(config);
    const double omega = point.omega;
    std::vector<double> x{point.rho_aa, point.rho_ab.real(), point.rho_ab.imag()};

    const auto rhs_at = [&](const std::vector<double>& y, std::vector<double>& out) {
        const double gamma = chain_gamma ? dynamic_rate(y, omega, config, point.gamma_collective)
                                         : point.gamma_collective;
        bloch_rhs(y, omega, gamma, k, out);
    };

    double j[3][3];
    std::vector<double> fp(3), fm(3), y(3);
    const double h = 1e-7;
    for (int col = 0; col < 3; ++col) {
        y = x;
        y[col] += h;
        rhs_at(y, fp);
        y = x;
        y[col] -= h;
        rhs_at(y, fm);
        for (int row = 0; row < 3; ++row)
            j[row][col] = (fp[row] - fm[row]) / (2.0 * h);
    }
    return j[0][0] * (j[1][1] * j[2][2] - j[1][2] * j[2][1]) -
           j[0][1] * (j[1][0] * j[2][2] - j[1][2] * j[2][0]) +
           j[0][2] * (j[1][0] * j[2][1] - j[1][1] * j[2][0]);
}

std::optional<BranchPoint> branch_curve_point(double w_bar, const BistabilityConfig& config) {
    config.validate();
    if (!(w_bar > 0.0) || !(w_bar <= 1.0))
        return std::nullopt;
    const RateConstants k = constants(config);

    // Omega^2 from the cubic solved for the drive, iterated against the rate:
    //   Om^2 = [(1+gs) - 2 Gab w] (Gab^2 + C^2 w^2) / (4 w Gab).
    const auto omega2_for = [&](double gamma) {
        const double gab = k.gamma_ab(gamma);
        return ((1.0 + k.gs) - 2.0 * gab * w_bar) * (gab * gab + k.c * k.c * w_bar * w_bar) /
               (4.0 * w_bar * gab);
    };

    double gamma = 0.0;
    double om2 = omega2_for(0.0);
    if (config.mode != CollectiveMode::off) {
        bool settled = false;
        om2 = std::max(om2, 0.0);
        for (int it = 0; it < 100000; ++it) {
            gamma = joint_rate(w_bar, std::sqrt(std::max(om2, 0.0)), config, gamma);
            const double next = omega2_for(gamma);
            if (next < 0.0)
                return std::nullopt;
            if (std::abs(next - om2) <= 1e-13 * std::max(1.0, std::abs(next))) {
                om2 = next;
                settled = true;
                break;
            }
            om2 = 0.5 * om2 + 0.5 * next;
        }
        if (!settled)
            throw ConvergenceError("branch_curve_point: drive iteration not converged");
    }
    if (om2 < 0.0)
        return std::nullopt;

    BranchPoint p;
    p.omega = std::sqrt(om2);
    p.gamma_collective = gamma;
    const AtomicState state = reconstruct_state(w_bar, p.omega, gamma, k);
    p.rho_aa = state.rho_aa;
    p.rho_ab = state.rho_ab;
    if (!state.is_physical(kStateTol))
        return std::nullopt;
    p.stable = classify_stability(p, config);
    return p;
}

std::vector<HysteresisPoint> hysteresis_sweep(const BistabilityConfig& config, bool ascending,
                                              double settle_time) {
    config.validate();
    std::vector<double> omegas = config.omega_grid;
    std::sort(omegas.begin(), omegas.end());
    if (!ascending)
        std::reverse(omegas.begin(), omegas.end());

    const RateConstants k = constants(config);
    std::vector<double> y{0.0, 0.0, 0.0}; // dark state seed
    double gamma_seed = 0.0;

    std::vector<HysteresisPoint> landings;
    OdeControl control;
    control.initial_step = 1e-3;
    control.max_step = 1.0;
    control.error_tol = 1e-9;
    for (double omega : omegas) {
        const auto rhs = [&](double, const std::vector<double>& yy, std::vector<double>& dydt) {
            const double gamma = dynamic_rate(yy, omega, config, gamma_seed);
            bloch_rhs(yy, omega, gamma, k, dydt);
        };
        const OdeTrajectory traj = integrate_ode(rhs, 0.0, settle_time, y, control, {settle_time});
        y = traj.states.back();
        gamma_seed = dynamic_rate(y, omega, config, gamma_seed);
        landings.push_back({omega, y[0]});
    }
    return landings;
}

} // namespace dense_bloch
