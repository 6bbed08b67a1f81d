#include "dense_bloch/rates.hpp"

#include <cmath>
#include <stdexcept>

namespace dense_bloch {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrtPi = 1.7724538509055160273;

// phi(x) = (1 - e^{-x}) / x, phi(0) = 1; stable for either sign of x.
double phi(double x) {
    if (std::abs(x) < 1e-6)
        return 1.0 - 0.5 * x + x * x / 6.0;
    return -std::expm1(-x) / x;
}

double composite_simpson(const std::function<double(double)>& f, double a, double b, int n) {
    if (n % 2 != 0)
        ++n;
    const double h = (b - a) / n;
    double sum = f(a) + f(b);
    for (int i = 1; i < n; ++i)
        sum += f(a + i * h) * (i % 2 == 0 ? 2.0 : 4.0);
    return sum * h / 3.0;
}

} // namespace

void VolumeGrid::validate() const {
    if (!(extent > 0.0))
        throw std::invalid_argument("VolumeGrid: extent must be > 0");
    if (node_count < 16)
        throw std::invalid_argument("VolumeGrid: node_count must be >= 16");
}

double small_sample_rate_spectral(const AtomicState& state, double delta,
                                  const DimensionlessGroups& groups) {
    groups.validate();
    if (groups.kappa == 0.0)
        return 0.0;
    const double dd = groups.doppler_width();
    const double u = std::exp(-0.5 * delta * delta / (dd * dd));
    const double big_k = groups.kappa * (1.0 - 2.0 * state.rho_aa);
    return state.rho_aa * groups.kappa * u * phi(big_k * u);
}

double small_sample_rate_averaged(const AtomicState& state, const DimensionlessGroups& groups,
                                  const QuadratureSpec& spec) {
    groups.validate();
    if (groups.kappa == 0.0 || state.rho_aa == 0.0)
        return 0.0;
    const double big_k = groups.kappa * (1.0 - 2.0 * state.rho_aa);
    const double avg = gauss_weighted_integral(
        [big_k](double y) {
            const double u = std::exp(-y * y);
            return u * phi(big_k * u);
        },
        spec);
    return state.rho_aa * groups.kappa * avg / kSqrtPi;
}

namespace {

double volume_rate(const std::function<double(double)>& source,
                   const std::function<double(double)>& absorption, double probe_position,
                   const VolumeGrid& grid, const DimensionlessGroups& groups, int n) {
    if (grid.geometry == Geometry::cylinder_on_axis) {
        // (C/4) * 4 pi int_0^R e^{2 q'' x} P^s(x) dx
        const auto f = [&](double x) { return std::exp(2.0 * absorption(x) * x) * source(x); };
        return kPi * groups.cooperativity * composite_simpson(f, 0.0, grid.extent, n);
    }
    // Slab: transverse integration gives 2 pi E1(2|q''| |z - z0|) per source plane.
    if (probe_position < 0.0 || probe_position > grid.extent)
        throw std::invalid_argument("general_rate_spectral: probe outside slab");
    const double h = grid.extent / n;
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
        const double a = j * h;
        const double b = a + h;
        const double zc = 0.5 * (a + b);
        const double q = absorption(zc);
        if (q >= 0.0)
            throw std::invalid_argument(
                "general_rate_spectral: slab geometry requires an absorbing medium (q0'' < 0)");
        const double k = -2.0 * q;
        double cell;
        const double u1 = std::abs(probe_position - a);
        const double u2 = std::abs(probe_position - b);
        if (a < probe_position && probe_position < b)
            cell = (exponential_integral_e1_primitive(k * u1) +
                    exponential_integral_e1_primitive(k * u2)) /
                   k;
        else
            cell = std::abs(exponential_integral_e1_primitive(k * u2) -
                            exponential_integral_e1_primitive(k * u1)) /
                   k;
        sum += source(zc) * cell;
    }
    return 0.5 * kPi * groups.cooperativity * sum;
}

} // namespace

double general_rate_spectral(const std::function<double(double)>& source_field,
                             const std::function<double(double)>& absorption_field,
                             double probe_position, const VolumeGrid& grid,
                             const DimensionlessGroups& groups) {
    grid.validate();
    groups.validate();
    const double fine =
        volume_rate(source_field, absorption_field, probe_position, grid, groups, grid.node_count);
    const double coarse = volume_rate(source_field, absorption_field, probe_position, grid, groups,
                                      grid.node_count / 2);
    if (std::abs(fine - coarse) > 1e-4 * (1.0 + std::abs(fine)))
        throw ConvergenceError("general_rate_spectral: volume grid too coarse");
    return fine;
}

double collective_shift(const std::function<double(double)>& gamma_profile, double omega,
                        double half_span, const QuadratureSpec& spec) {
    if (!(half_span > 0.0))
        throw std::invalid_argument("collective_shift: half_span must be > 0");
    return principal_value_integral(gamma_profile, omega, omega - half_span, omega + half_span,
                                    spec) /
           (2.0 * kPi);
}

std::vector<double> shift_profile(const AtomicState& state, const DimensionlessGroups& groups,
                                  const std::vector<double>& delta_grid, Warnings* warnings) {
    groups.validate();
    const double dd = groups.doppler_width();
    double max_abs = 0.0;
    for (double d : delta_grid)
        max_abs = std::max(max_abs, std::abs(d));
    if (warnings && max_abs < 8.0 * dd)
        warnings->add("shift_profile: detuning grid spans less than 8 Doppler widths");
    const double span = std::max(8.0 * dd, max_abs + 4.0 * dd);
    const auto profile = [&](double dp) { return small_sample_rate_spectral(state, dp, groups); };
    std::vector<double> shifts(delta_grid.size());
    for (std::size_t i = 0; i < delta_grid.size(); ++i) {
        const double w = delta_grid[i];
        shifts[i] = principal_value_integral(profile, w, -span, span, QuadratureSpec{}) / (2.0 * kPi);
    }
    return shifts;
}

double linear_limit_rate(const std::function<double(double)>& excitation,
                         const DimensionlessGroups& groups, const VolumeGrid& grid,
                         const QuadratureSpec& spec) {
    grid.validate();
    groups.validate();
    spec.validate();
    const double k0 = groups.kappa / grid.extent; // line-center opacity per wavelength
    const GaussHermite gh(spec.node_count);

    if (grid.geometry == Geometry::cylinder_on_axis) {
        double total = 0.0;
        for (std::size_t ix = 0; ix < gh.nodes().size(); ++ix) {
            const double k = k0 * std::exp(-gh.nodes()[ix] * gh.nodes()[ix]);
            const auto f = [&](double r) { return k * std::exp(-k * r) * excitation(r); };
            total += gh.weights()[ix] * composite_simpson(f, 0.0, grid.extent, grid.node_count);
        }
        return total / kSqrtPi;
    }

    // Slab, probe at the centre: per-cell E1 primitive, Gauss average over the line.
    const double z0 = 0.5 * grid.extent;
    const double h = grid.extent / grid.node_count;
    double total = 0.0;
    for (std::size_t ix = 0; ix < gh.nodes().size(); ++ix) {
        const double k = k0 * std::exp(-gh.nodes()[ix] * gh.nodes()[ix]);
        double sum = 0.0;
        for (int j = 0; j < grid.node_count; ++j) {
            const double a = j * h;
            const double b = a + h;
            const double u1 = std::abs(z0 - a);
            const double u2 = std::abs(z0 - b);
            // int_cell (K/2) E1(K |z - z0|) dz via the E1 primitive
            double cell;
            if (a < z0 && z0 < b)
                cell = 0.5 * (exponential_integral_e1_primitive(k * u1) +
                              exponential_integral_e1_primitive(k * u2));
            else
                cell = 0.5 * std::abs(exponential_integral_e1_primitive(k * u2) -
                                      exponential_integral_e1_primitive(k * u1));
            sum += excitation(0.5 * (a + b)) * cell;
        }
        total += gh.weights()[ix] * sum;
    }
    return total / kSqrtPi;
}

} // namespace dense_bloch
