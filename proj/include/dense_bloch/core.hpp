#ifndef DENSE_BLOCH_CORE_HPP
#define DENSE_BLOCH_CORE_HPP

#include <complex>
#include <string>
#include <vector>

// Parameter containers and unit conventions shared by all solvers.
//
// Internal convention (reduced units): rates and frequencies in units of the
// free-space radiative rate gamma, times in 1/gamma, lengths in units of the
// transition wavelength lambda, level shifts in hbar*gamma. SI values appear
// only at the I/O boundary.

namespace dense_bloch {

namespace si {
inline constexpr double hbar = 1.054571817e-34;      // J s
inline constexpr double epsilon0 = 8.8541878128e-12; // F/m
inline constexpr double c = 299792458.0;             // m/s
} // namespace si

enum class Geometry { cylinder_on_axis, slab };

// Collects warnings emitted by routines whose validity regime can be left
// without making the result meaningless (strong-Doppler form, Markov bound).
struct Warnings {
    std::vector<std::string> messages;
    void add(std::string msg) { messages.push_back(std::move(msg)); }
    bool empty() const { return messages.empty(); }
};

// Physical description of the sample in SI units.
struct MediumParameters {
    double atom_density = 0;          // N, atoms per m^3
    double transition_wavelength = 0; // lambda, m
    double rest_frequency = 0;        // omega_ab^0, rad/s; 0 = derive from lambda
    double radiative_rate = 0;        // gamma, 1/s
    double nonradiative_rate = 0;     // gamma*, 1/s
    double doppler_width = 0;         // Delta_D, rad/s (Gaussian std deviation)
    double sample_length = 0;         // d, m
    Geometry geometry = Geometry::cylinder_on_axis;

    // Throws std::invalid_argument on non-finite or out-of-range fields.
    void validate() const;
};

// The dimensionless combinations every reduced-unit solver runs on.
// Two parameter sets with identical groups produce identical outputs.
struct DimensionlessGroups {
    double g = 0;             // gamma / (sqrt(2 pi) Delta_D)
    double eta = 0;           // N lambda^2 d
    double cooperativity = 0; // C = N lambda^3 / (4 pi^2)
    double r = 0;             // pi d / lambda
    double kappa = 0;         // line-center opacity K0*d = eta*g

    // Doppler width in units of gamma (1 / (sqrt(2 pi) g)).
    double doppler_width() const;

    void validate() const;
};

DimensionlessGroups derive_groups(const MediumParameters& params);

// Free-space spontaneous emission rate of a dipole transition,
// gamma = p^2 w^3 / (3 pi hbar eps0 c^3). SI units.
double free_space_gamma(double dipole_moment, double angular_frequency);

// Equivalent closed form 8 pi^2 p^2 / (3 hbar eps0 lambda^3).
double free_space_gamma_from_wavelength(double dipole_moment, double wavelength);

// Two-level density matrix. Closure rho_bb = 1 - rho_aa is built in;
// only the excited population and the coherence are stored.
struct AtomicState {
    double rho_aa = 0;
    std::complex<double> rho_ab{0, 0};

    double rho_bb() const { return 1.0 - rho_aa; }
    // w = rho_aa - rho_bb
    double population_difference() const { return 2.0 * rho_aa - 1.0; }

    bool is_physical(double tol = 1e-9) const;
    // Throws std::invalid_argument when population or positivity bounds fail.
    void validate(double tol = 1e-9) const;
};

std::string to_string(Geometry geometry);

} // namespace dense_bloch

#endif
