#include "dense_bloch/response.hpp"

#include <cmath>
#include <stdexcept>

namespace dense_bloch {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_doppler_regime(const DimensionlessGroups& groups, double gamma_ab, Warnings* warnings) {
    groups.validate();
    if (groups.g <= 0.0)
        throw std::invalid_argument("doppler response requires g > 0 (finite Doppler width)");
    if (warnings && groups.doppler_width() < 10.0 * gamma_ab)
        warnings->add("strong-Doppler form invalid: Delta_D < 10 Gamma_ab");
}

} // namespace

std::complex<double> doppler_response(const AtomicState& state, double delta,
                                      const DimensionlessGroups& groups, double gamma_ab,
                                      Warnings* warnings) {
    check_doppler_regime(groups, gamma_ab, warnings);
    const double dd = groups.doppler_width();
    const double x = delta / dd;
    const double base =
        2.0 * kPi * groups.g * state.population_difference() * std::exp(-0.5 * x * x);
    // sqrt(2/pi) int_0^x e^{-y^2/2} dy = erf(x / sqrt(2))
    return {base, -base * std::erf(x / std::sqrt(2.0))};
}

double doppler_source(const AtomicState& state, double delta, const DimensionlessGroups& groups,
                      double gamma_ab, Warnings* warnings) {
    check_doppler_regime(groups, gamma_ab, warnings);
    const double dd = groups.doppler_width();
    const double x = delta / dd;
    return 4.0 * kPi * groups.g * state.rho_aa * std::exp(-0.5 * x * x);
}

PropagationCoefficient propagation_coefficient(std::complex<double> p_ret_reduced,
                                               const DimensionlessGroups& groups,
                                               Warnings* warnings) {
    const double c_half = 0.5 * groups.cooperativity;
    if (warnings && std::abs(c_half * p_ret_reduced.imag()) >= 1.0)
        warnings->add("|Im P^ret| hbar/3eps0 >= 1: propagation expansion unreliable");
    PropagationCoefficient q;
    q.q0_prime = 2.0 * kPi * (1.0 - c_half * p_ret_reduced.imag());
    q.q0_double_prime = 2.0 * kPi * c_half * p_ret_reduced.real();
    return q;
}

PropagationCoefficient doppler_absorption_coefficient(const AtomicState& state, double delta,
                                                      const DimensionlessGroups& groups,
                                                      double gamma_ab, Warnings* warnings) {
    return propagation_coefficient(doppler_response(state, delta, groups, gamma_ab, warnings),
                                   groups, warnings);
}

std::complex<double> driven_response_resonance(const AtomicState& state,
                                               std::complex<double> local_rabi, double gamma_ab) {
    if (!(gamma_ab > 0.0))
        throw std::invalid_argument("driven_response_resonance: Gamma_ab must be > 0");
    const double denom = gamma_ab * gamma_ab + 2.0 * std::norm(local_rabi);
    return {gamma_ab * state.population_difference() / denom, 0.0};
}

double driven_source_resonance(const AtomicState& state, std::complex<double> local_rabi,
                               double gamma_ab) {
    if (!(gamma_ab > 0.0))
        throw std::invalid_argument("driven_source_resonance: Gamma_ab must be > 0");
    const double ol2 = std::norm(local_rabi);
    const double num = gamma_ab * gamma_ab * (state.rho_aa - std::norm(state.rho_ab)) +
                       2.0 * ol2 * state.rho_aa * state.rho_bb();
    return 2.0 * num / (gamma_ab * (gamma_ab * gamma_ab + 2.0 * ol2));
}

PropagationCoefficient driven_absorption_coefficient(const AtomicState& state,
                                                     std::complex<double> local_rabi,
                                                     double gamma_ab,
                                                     const DimensionlessGroups& groups,
                                                     Warnings* warnings) {
    return propagation_coefficient(driven_response_resonance(state, local_rabi, gamma_ab), groups,
                                   warnings);
}

} // namespace dense_bloch
