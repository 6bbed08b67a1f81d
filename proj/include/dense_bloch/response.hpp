#ifndef DENSE_BLOCH_RESPONSE_HPP
#define DENSE_BLOCH_RESPONSE_HPP

#include <complex>

#include "dense_bloch/core.hpp"

// Medium response P^ret and incoherent source P^s, and the complex
// propagation coefficient q0 they generate, for the undriven Doppler
// broadened gas and for the resonantly driven gas.
//
// Reduced convention: P^ret and P^s are returned in units of
// p^2 N / (hbar^2 gamma); rates in gamma; q0 components per wavelength.
// The dipole moment never appears on its own: it is eliminated through the
// free-space relation p^2 = 3 pi hbar eps0 c^3 gamma / w^3, which reduces
// every propagation factor to the dimensionless groups.

namespace dense_bloch {

struct ResponseFunctions {
    std::complex<double> p_ret{0, 0};
    double p_s = 0;
    double frequency = 0; // detuning from rest-frame resonance, units of gamma
};

struct PropagationCoefficient {
    double q0_prime = 0;        // phase per wavelength
    double q0_double_prime = 0; // gain (+) / absorption (-) per wavelength
};

// Strong-Doppler closed form of the retarded response,
//   2 pi g (rho_aa - rho_bb) e^{-D^2/2} [1 - i sqrt(2/pi) int_0^D e^{-y^2/2} dy],
// with D = delta / Delta_D. Warns when Delta_D < 10 Gamma_ab.
std::complex<double> doppler_response(const AtomicState& state, double delta,
                                      const DimensionlessGroups& groups, double gamma_ab = 0.5,
                                      Warnings* warnings = nullptr);

// Strong-Doppler source term 4 pi g rho_aa e^{-D^2/2}.
double doppler_source(const AtomicState& state, double delta, const DimensionlessGroups& groups,
                      double gamma_ab = 0.5, Warnings* warnings = nullptr);

PropagationCoefficient doppler_absorption_coefficient(const AtomicState& state, double delta,
                                                      const DimensionlessGroups& groups,
                                                      double gamma_ab = 0.5,
                                                      Warnings* warnings = nullptr);

// Stationary driven response at resonance:
//   P^ret = Gamma_ab (rho_aa - rho_bb) / (Gamma_ab^2 + 2 |Omega_L|^2).
std::complex<double> driven_response_resonance(const AtomicState& state,
                                               std::complex<double> local_rabi, double gamma_ab);

// Driven source at resonance:
//   P^s = 2 [Gamma_ab^2 (rho_aa - |rho_ab|^2) + 2 |Omega_L|^2 rho_aa rho_bb]
//         / [Gamma_ab (Gamma_ab^2 + 2 |Omega_L|^2)].
double driven_source_resonance(const AtomicState& state, std::complex<double> local_rabi,
                               double gamma_ab);

PropagationCoefficient driven_absorption_coefficient(const AtomicState& state,
                                                     std::complex<double> local_rabi,
                                                     double gamma_ab,
                                                     const DimensionlessGroups& groups,
                                                     Warnings* warnings = nullptr);

// q0 per wavelength from a reduced response value: 2 pi [1 + i (C/2) P^ret].
PropagationCoefficient propagation_coefficient(std::complex<double> p_ret_reduced,
                                               const DimensionlessGroups& groups,
                                               Warnings* warnings = nullptr);

} // namespace dense_bloch

#endif
