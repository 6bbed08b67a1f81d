#include "dense_bloch/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dense_bloch/rates.hpp"

namespace dense_bloch {

namespace {

double collective_rate(double rho_aa, const DimensionlessGroups& groups,
                       const QuadratureSpec& spec) {
    AtomicState state;
    state.rho_aa = std::clamp(rho_aa, 0.0, 1.0);
    return small_sample_rate_averaged(state, groups, spec);
}

} // namespace

DecayTrajectory evolve_two_level(const AtomicState& initial, const DimensionlessGroups& groups,
                                 double t_end, int sample_count, const DecayControls& controls,
                                 const std::vector<double>& snapshot_times,
                                 const std::vector<double>& snapshot_grid) {
    initial.validate();
    groups.validate();
    if (std::abs(initial.rho_ab) != 0.0)
        throw std::invalid_argument("evolve_two_level: undriven ensemble carries no coherence");
    if (!(t_end > 0.0) || sample_count < 2)
        throw std::invalid_argument("evolve_two_level: need t_end > 0 and at least 2 samples");

    std::vector<double> samples(sample_count);
    for (int i = 0; i < sample_count; ++i)
        samples[i] = t_end * i / (sample_count - 1);
    samples.front() = 0.0;
    // Merge snapshot times into the sample list.
    for (double ts : snapshot_times) {
        if (ts < 0.0 || ts > t_end)
            throw std::invalid_argument("evolve_two_level: snapshot time outside [0, t_end]");
        samples.push_back(ts);
    }
    std::sort(samples.begin(), samples.end());
    samples.erase(std::unique(samples.begin(), samples.end(),
                              [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                  samples.end());

    const auto rhs = [&](double, const std::vector<double>& y, std::vector<double>& dydt) {
        const double gamma_t = collective_rate(y[0], groups, controls.quadrature);
        dydt[0] = gamma_t - (1.0 + 2.0 * gamma_t) * y[0];
    };
    const auto check_state = [](double, const std::vector<double>& y) {
        AtomicState s;
        s.rho_aa = y[0];
        s.validate(1e-9);
    };

    const OdeTrajectory ode =
        integrate_ode(rhs, 0.0, t_end, {initial.rho_aa}, controls.ode, samples, check_state);

    DecayTrajectory out;
    const double doppler = groups.g > 0.0 ? groups.doppler_width()
                                          : std::numeric_limits<double>::infinity();
    out.times.reserve(ode.times.size());
    for (std::size_t i = 0; i < ode.times.size(); ++i) {
        const double rho = ode.states[i][0];
        const double gamma_t = collective_rate(rho, groups, controls.quadrature);
        out.times.push_back(ode.times[i]);
        out.rho_aa.push_back(rho);
        out.gamma_avg.push_back(gamma_t);
        out.gamma_eff.push_back(rho > 1e-12 ? 1.0 + 2.0 * gamma_t - gamma_t / rho : 1.0);
        out.max_gamma = std::max(out.max_gamma, gamma_t);
    }
    out.markov_flag = out.max_gamma > controls.markov_fraction * doppler;

    // rho_aa must decrease monotonically for the undriven decay problem.
    for (std::size_t i = 1; i < out.rho_aa.size(); ++i)
        if (out.rho_aa[i] > out.rho_aa[i - 1] + 1e-9)
            throw std::logic_error("evolve_two_level: rho_aa increased along the trajectory");

    if (!snapshot_times.empty()) {
        std::vector<double> grid = snapshot_grid;
        if (grid.empty()) {
            grid.resize(241);
            for (std::size_t i = 0; i < grid.size(); ++i)
                grid[i] = -6.0 + 12.0 * static_cast<double>(i) / (grid.size() - 1);
        }
        for (double ts : snapshot_times) {
            const auto it = std::min_element(out.times.begin(), out.times.end(),
                                             [ts](double a, double b) {
                                                 return std::abs(a - ts) < std::abs(b - ts);
                                             });
            const std::size_t idx = static_cast<std::size_t>(it - out.times.begin());
            AtomicState state;
            state.rho_aa = out.rho_aa[idx];
            SpectrumSnapshot snap = spectrum_snapshot(state, groups, grid);
            snap.time = out.times[idx];
            out.snapshots.push_back(std::move(snap));
        }
    }
    return out;
}

std::vector<double> effective_rate(const DecayTrajectory& trajectory) {
    std::vector<double> rates;
    rates.reserve(trajectory.times.size());
    for (std::size_t i = 0; i < trajectory.times.size(); ++i) {
        const double rho = trajectory.rho_aa[i];
        if (rho < 1e-12)
            throw std::runtime_error("effective_rate: rho_aa below 1e-12, series truncated");
        rates.push_back(1.0 + 2.0 * trajectory.gamma_avg[i] - trajectory.gamma_avg[i] / rho);
    }
    return rates;
}

SpectrumSnapshot spectrum_snapshot(const AtomicState& state, const DimensionlessGroups& groups,
                                   const std::vector<double>& delta_over_doppler,
                                   Warnings* warnings) {
    state.validate();
    groups.validate();
    if (delta_over_doppler.size() < 8)
        throw std::invalid_argument("spectrum_snapshot: grid too small");
    double max_abs = 0.0;
    for (double d : delta_over_doppler)
        max_abs = std::max(max_abs, std::abs(d));
    if (warnings && max_abs < 4.0)
        warnings->add("spectrum_snapshot: grid spans less than 4 Doppler widths");

    const double dd = groups.doppler_width();
    const double avg = small_sample_rate_averaged(state, groups);
    SpectrumSnapshot snap;
    snap.rho_aa = state.rho_aa;
    snap.delta_over_doppler = delta_over_doppler;
    snap.profile.resize(delta_over_doppler.size());
    for (std::size_t i = 0; i < delta_over_doppler.size(); ++i) {
        const double spectral = small_sample_rate_spectral(state, delta_over_doppler[i] * dd, groups);
        snap.profile[i] = avg > 0.0 ? spectral / avg : 0.0;
    }
    return snap;
}

double profile_fwhm(const std::vector<double>& grid, const std::vector<double>& values) {
    if (grid.size() != values.size() || grid.size() < 3)
        throw std::invalid_argument("profile_fwhm: bad profile");
    const auto it = std::max_element(values.begin(), values.end());
    const std::size_t peak = static_cast<std::size_t>(it - values.begin());
    const double half = 0.5 * *it;
    double left = grid.front(), right = grid.back();
    for (std::size_t i = peak; i-- > 0;) {
        if (values[i] < half) {
            const double f = (half - values[i]) / (values[i + 1] - values[i]);
            left = grid[i] + f * (grid[i + 1] - grid[i]);
            break;
        }
    }
    for (std::size_t i = peak; i + 1 < values.size(); ++i) {
        if (values[i + 1] < half) {
            const double f = (values[i] - half) / (values[i] - values[i + 1]);
            right = grid[i] + f * (grid[i + 1] - grid[i]);
            break;
        }
    }
    return right - left;
}

} // namespace dense_bloch
