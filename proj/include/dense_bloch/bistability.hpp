#ifndef DENSE_BLOCH_BISTABILITY_HPP
#define DENSE_BLOCH_BISTABILITY_HPP

#include <complex>
#include <optional>
#include <vector>

#include "dense_bloch/core.hpp"

// Stationary solutions of the coherently driven dense two-level medium:
// branch structure versus drive strength, self-consistent collective decay
// and linear stability. Everything is in units of gamma; the drive Rabi
// frequency Omega is real.

namespace dense_bloch {

enum class CollectiveMode { off, explicit_approx, fixed_point };

struct BistabilityConfig {
    double cooperativity = 0;   // C = N lambda^3 / 4 pi^2
    double slab_parameter = 0;  // r = pi d / lambda
    double gamma_star_ratio = 0;
    CollectiveMode mode = CollectiveMode::off;
    std::vector<double> omega_grid;

    void validate() const;
};

struct BranchPoint {
    double omega = 0;
    double rho_aa = 0;
    std::complex<double> rho_ab{0, 0};
    double gamma_collective = 0;
    bool stable = false;
    int branch_id = 0; // index in ascending rho_aa at this omega

    AtomicState state() const { return AtomicState{rho_aa, rho_ab}; }
};

// All stationary solutions of the driven Bloch equations with Gamma = 0: the
// coherence is eliminated analytically and the population equation reduces to
// a real cubic in the population difference.
std::vector<BranchPoint> stationary_branches(const BistabilityConfig& config);

// Explicit approximation of the collective rate,
//   Gamma/gamma = rho_aa (1 - e^{-K}) / (1 - 2 rho_aa),
// valid for absorbing stationary states rho_aa < 1/2 (throws above).
double collective_rate_explicit(double rho_aa, double omega, const BistabilityConfig& config);

// Self-consistent collective rate Gamma = F(Gamma; state) with
// Gamma_ab = Gamma + (1 + gamma*/gamma)/2 entering the right-hand side.
// Damped fixed-point iteration, residual < 1e-10.
double collective_rate_fixed_point(const AtomicState& state, double omega,
                                   const BistabilityConfig& config, double gamma_seed = 0.0);

// Branch structure with the collective rate folded in: stationary equations
// and the selected rate relation are solved jointly for every grid Omega.
std::vector<BranchPoint> self_consistent_branches(const BistabilityConfig& config);

// Linearization of the driven Bloch equations in (rho_aa, Re rho_ab,
// Im rho_ab); stable iff all eigenvalues have negative real part
// (Routh-Hurwitz). For collective modes the rate follows the state, so its
// derivatives enter the Jacobian.
bool classify_stability(const BranchPoint& point, const BistabilityConfig& config);

// Determinant of the stationarity Jacobian. With chain_gamma the collective
// rate responds to the state, which is the singularity condition located at
// branch folds; without it the Jacobian matches classify_stability.
double stationarity_jacobian_determinant(const BranchPoint& point,
                                         const BistabilityConfig& config, bool chain_gamma);

// Point of the self-consistent solution curve parametrized by the population
// difference w_bar = rho_bb - rho_aa; empty when no drive Omega >= 0 exists.
std::optional<BranchPoint> branch_curve_point(double w_bar, const BistabilityConfig& config);

struct HysteresisPoint {
    double omega = 0;
    double rho_aa = 0;
};

// Quasi-static sweep: at each Omega the full time-dependent system (with the
// rate re-evaluated from the instantaneous state) relaxes from the previous
// landing state.
std::vector<HysteresisPoint> hysteresis_sweep(const BistabilityConfig& config, bool ascending,
                                              double settle_time = 400.0);

} // namespace dense_bloch

#endif
