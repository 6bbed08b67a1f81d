#include "dense_bloch/core.hpp"

#include <cmath>
#include <stdexcept>

namespace dense_bloch {

namespace {
constexpr double kPi = 3.14159265358979323846;

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }
bool nonnegative_finite(double x) { return std::isfinite(x) && x >= 0.0; }
} // namespace

void MediumParameters::validate() const {
    if (!positive_finite(atom_density))
        throw std::invalid_argument("atom_density must be finite and > 0");
    if (!positive_finite(transition_wavelength))
        throw std::invalid_argument("transition_wavelength must be finite and > 0");
    if (!positive_finite(radiative_rate))
        throw std::invalid_argument("radiative_rate must be finite and > 0");
    if (!nonnegative_finite(nonradiative_rate))
        throw std::invalid_argument("nonradiative_rate must be finite and >= 0");
    if (!nonnegative_finite(doppler_width))
        throw std::invalid_argument("doppler_width must be finite and >= 0");
    if (!positive_finite(sample_length))
        throw std::invalid_argument("sample_length must be finite and > 0");
    if (rest_frequency != 0.0 && !positive_finite(rest_frequency))
        throw std::invalid_argument("rest_frequency must be 0 (derived) or > 0");
}

double DimensionlessGroups::doppler_width() const {
    if (g <= 0.0)
        throw std::domain_error("doppler_width undefined for g <= 0");
    return 1.0 / (std::sqrt(2.0 * kPi) * g);
}

void DimensionlessGroups::validate() const {
    if (!std::isfinite(g) || g < 0.0)
        throw std::invalid_argument("group g must be finite and >= 0");
    if (!std::isfinite(eta) || eta < 0.0)
        throw std::invalid_argument("group eta must be finite and >= 0");
    if (!std::isfinite(cooperativity) || cooperativity < 0.0)
        throw std::invalid_argument("cooperativity must be finite and >= 0");
    if (!std::isfinite(r) || r < 0.0)
        throw std::invalid_argument("group r must be finite and >= 0");
    if (!std::isfinite(kappa) || kappa < 0.0)
        throw std::invalid_argument("kappa must be finite and >= 0");
}

DimensionlessGroups derive_groups(const MediumParameters& params) {
    params.validate();
    const double lambda = params.transition_wavelength;
    DimensionlessGroups groups;
    groups.g = params.doppler_width > 0.0
                   ? params.radiative_rate / (std::sqrt(2.0 * kPi) * params.doppler_width)
                   : 0.0;
    groups.eta = params.atom_density * lambda * lambda * params.sample_length;
    groups.cooperativity = params.atom_density * lambda * lambda * lambda / (4.0 * kPi * kPi);
    groups.r = kPi * params.sample_length / lambda;
    groups.kappa = groups.eta * groups.g;
    return groups;
}

double free_space_gamma(double dipole_moment, double angular_frequency) {
    if (!positive_finite(dipole_moment) || !positive_finite(angular_frequency))
        throw std::invalid_argument("free_space_gamma requires dipole > 0 and frequency > 0");
    const double w = angular_frequency;
    return dipole_moment * dipole_moment * w * w * w / (3.0 * kPi * si::hbar * si::epsilon0 * si::c * si::c * si::c);
}

double free_space_gamma_from_wavelength(double dipole_moment, double wavelength) {
    if (!positive_finite(dipole_moment) || !positive_finite(wavelength))
        throw std::invalid_argument("free_space_gamma requires dipole > 0 and wavelength > 0");
    return 8.0 * kPi * kPi * dipole_moment * dipole_moment /
           (3.0 * si::hbar * si::epsilon0 * wavelength * wavelength * wavelength);
}

bool AtomicState::is_physical(double tol) const {
    if (!std::isfinite(rho_aa) || !std::isfinite(rho_ab.real()) || !std::isfinite(rho_ab.imag()))
        return false;
    if (rho_aa < -tol || rho_aa > 1.0 + tol)
        return false;
    return std::norm(rho_ab) <= rho_aa * rho_bb() + tol;
}

void AtomicState::validate(double tol) const {
    if (!is_physical(tol))
        throw std::invalid_argument("AtomicState violates population or positivity bounds");
}

std::string to_string(Geometry geometry) {
    return geometry == Geometry::cylinder_on_axis ? "cylinder-on-axis" : "slab";
}

} // namespace dense_bloch
