#ifndef DENSE_BLOCH_RATES_HPP
#define DENSE_BLOCH_RATES_HPP

#include <functional>
#include <vector>

#include "dense_bloch/core.hpp"
#include "dense_bloch/numerics.hpp"

// Collective decay/pump rate Gamma and collective light shift H obtained from
// the incoherent radiation propagated through the medium. All rates are
// returned in units of gamma, shifts in hbar*gamma.

namespace dense_bloch {

// Position grid for the propagated-field volume integral. Coordinates are in
// wavelengths; for the on-axis cylinder the coordinate is the radial distance
// from the probe, for the slab it is the depth inside [0, extent].
struct VolumeGrid {
    Geometry geometry = Geometry::cylinder_on_axis;
    double extent = 0;    // d / lambda
    int node_count = 512; // integration intervals

    void validate() const;
};

// Spectral rate of the homogeneous on-axis sample,
//   Gamma(w)/gamma = rho_aa kappa u phi(K u),  u = e^{-delta^2 / 2 Delta_D^2},
// with K = kappa (rho_bb - rho_aa) and phi(x) = (1 - e^{-x})/x. The removable
// singularity at rho_aa = 1/2 is evaluated by series switch-over.
double small_sample_rate_spectral(const AtomicState& state, double delta,
                                  const DimensionlessGroups& groups);

// Gaussian velocity average of the spectral rate.
double small_sample_rate_averaged(const AtomicState& state, const DimensionlessGroups& groups,
                                  const QuadratureSpec& spec = {});

// Collective rate from explicit source and absorption fields on a volume
// grid: Gamma(w)/gamma = (C/4) int d^3x e^{2 q0'' x} / x^2 P^s(x) in reduced
// units. Checks grid convergence by halving the resolution.
double general_rate_spectral(const std::function<double(double)>& source_field,
                             const std::function<double(double)>& absorption_field,
                             double probe_position, const VolumeGrid& grid,
                             const DimensionlessGroups& groups);

// Principal-value transform of a spectral rate profile,
//   H(w) = (1/2pi) P int Gamma(w') / (w - w') dw',
// integrated over [w - half_span, w + half_span].
double collective_shift(const std::function<double(double)>& gamma_profile, double omega,
                        double half_span, const QuadratureSpec& spec = {});

// H(delta) for the Doppler gas evaluated on a detuning grid (units of gamma).
// Warns when the grid spans less than 8 Doppler widths.
std::vector<double> shift_profile(const AtomicState& state, const DimensionlessGroups& groups,
                                  const std::vector<double>& delta_grid,
                                  Warnings* warnings = nullptr);

// Linear-limit (ground-state propagation) rate for a given excitation field.
double linear_limit_rate(const std::function<double(double)>& excitation,
                         const DimensionlessGroups& groups, const VolumeGrid& grid,
                         const QuadratureSpec& spec = {});

} // namespace dense_bloch

#endif
