#ifndef DENSE_BLOCH_DYNAMICS_HPP
#define DENSE_BLOCH_DYNAMICS_HPP

#include <vector>

#include "dense_bloch/core.hpp"
#include "dense_bloch/numerics.hpp"

// Time evolution of the inhomogeneously broadened two-level ensemble:
// population equation with self-consistent collective rate, effective decay
// rate and time-resolved incoherent spectra. No coherent drive acts here, so
// the coherence stays zero and only rho_aa is integrated.

namespace dense_bloch {

struct DecayControls {
    OdeControl ode{1e-4, 0.25, 1e-10, 4000000};
    QuadratureSpec quadrature{};
    double markov_fraction = 0.5; // flag when Gamma exceeds this fraction of Delta_D
};

struct SpectrumSnapshot {
    double time = 0;
    double rho_aa = 0;
    std::vector<double> delta_over_doppler;
    std::vector<double> profile; // Gamma(w, t) / Gamma(t)
};

struct DecayTrajectory {
    std::vector<double> times;      // units of 1/gamma
    std::vector<double> rho_aa;
    std::vector<double> gamma_avg;  // Gamma(t)/gamma
    std::vector<double> gamma_eff;  // Gamma_eff(t)/gamma from the ODE right-hand side
    std::vector<SpectrumSnapshot> snapshots;
    bool markov_flag = false;       // Markov bound violated (superradiant regime)
    double max_gamma = 0;
};

// Integrate d/dt rho_aa = Gamma - (1 + 2 Gamma) rho_aa with Gamma re-evaluated
// from the current state inside every derivative call.
DecayTrajectory evolve_two_level(const AtomicState& initial, const DimensionlessGroups& groups,
                                 double t_end, int sample_count, const DecayControls& controls = {},
                                 const std::vector<double>& snapshot_times = {},
                                 const std::vector<double>& snapshot_grid = {});

// Gamma_eff(t_k) = 1 + 2 Gamma(t_k) - Gamma(t_k) / rho_aa(t_k).
std::vector<double> effective_rate(const DecayTrajectory& trajectory);

// Normalized spectral profile Gamma(w, t) / Gamma(t) on a detuning grid given
// in Doppler widths. Warns when the grid spans less than 4 Doppler widths.
SpectrumSnapshot spectrum_snapshot(const AtomicState& state, const DimensionlessGroups& groups,
                                   const std::vector<double>& delta_over_doppler,
                                   Warnings* warnings = nullptr);

// Full width at half maximum of a sampled profile by linear interpolation.
double profile_fwhm(const std::vector<double>& grid, const std::vector<double>& values);

} // namespace dense_bloch

#endif
