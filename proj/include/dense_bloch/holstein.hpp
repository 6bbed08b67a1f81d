#ifndef DENSE_BLOCH_HOLSTEIN_HPP
#define DENSE_BLOCH_HOLSTEIN_HPP

#include <vector>

#include "dense_bloch/core.hpp"
#include "dense_bloch/numerics.hpp"

// Linear radiation-trapping limit: Doppler-averaged reabsorption kernel, the
// spatially resolved linear evolution on a slab, and the fundamental-mode
// escape rate with its asymptotic estimate.

namespace dense_bloch {

// Discretized reabsorption operator. matrix[i*n+j] is the probability that a
// photon emitted anywhere in cell j is reabsorbed such that it excites the
// probe position z_i (cell-integrated kernel, quadrature weights included).
struct TrappingKernel {
    Geometry geometry = Geometry::slab;
    double kappa = 0;   // line-center opacity across the domain
    double thickness = 0;
    std::vector<double> nodes; // cell midpoints
    std::vector<double> matrix; // row-major, size n*n

    int size() const { return static_cast<int>(nodes.size()); }
    double entry(int i, int j) const { return matrix[static_cast<std::size_t>(i) * nodes.size() + j]; }
    std::vector<double> row_sums() const;
};

// Radial reabsorption density of the 3-D kernel,
//   (1/sqrt(pi)) int e^{-x^2} (K0 e^{-x^2} / 4 pi r^2) exp(-K0 e^{-x^2} r) dx.
double kernel_point(double r, double k0, const QuadratureSpec& spec = {});

// Fraction of emitted photons reabsorbed within radius R,
//   int_0^R 4 pi r^2 G(r) dr; monotone in R with limit 1.
double kernel_capture(double radius, double k0, const QuadratureSpec& spec = {});

// Single-frequency (no Gauss average) capture fraction 1 - e^{-k r}.
double kernel_capture_single_frequency(double radius, double k);

TrappingKernel build_slab_kernel(double thickness, double kappa, int node_count,
                                 const QuadratureSpec& spec = {});

struct FieldTrajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> excitation;
};

// Linear trapping evolution d/dt rho(z) = -rho(z) + sum_j G(z, z_j) rho(z_j).
FieldTrajectory evolve_linear_trapping(const TrappingKernel& kernel,
                                       const std::vector<double>& initial_excitation, double t_end,
                                       int sample_count, const OdeControl& control = {});

struct EscapeRateResult {
    double gamma_esc_numeric = 0;    // gamma (1 - lambda_max)
    double gamma_esc_asymptotic = 0; // gamma / [kappa sqrt(pi ln kappa)]
    double lambda_max = 0;
    std::vector<double> fundamental_mode;
};

// Dominant eigenvalue of the kernel by power iteration with a deflation check
// on the spectral gap. Requires kappa > e for the asymptotic comparison.
EscapeRateResult escape_rate(const TrappingKernel& kernel, double tol = 1e-10);

} // namespace dense_bloch

#endif
