#include "dense_bloch/holstein.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dense_bloch/parallel.hpp"

namespace dense_bloch {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrtPi = 1.7724538509055160273;
} // namespace

std::vector<double> TrappingKernel::row_sums() const {
    const int n = size();
    std::vector<double> sums(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            sums[i] += entry(i, j);
    return sums;
}

double kernel_point(double r, double k0, const QuadratureSpec& spec) {
    if (!(r > 0.0) || !(k0 > 0.0))
        throw std::invalid_argument("kernel_point: requires r > 0 and k0 > 0");
    return gauss_weighted_integral(
               [r, k0](double x) {
                   const double k = k0 * std::exp(-x * x);
                   return k / (4.0 * kPi * r * r) * std::exp(-k * r);
               },
               spec) /
           kSqrtPi;
}

double kernel_capture(double radius, double k0, const QuadratureSpec& spec) {
    if (!(radius >= 0.0) || !(k0 > 0.0))
        throw std::invalid_argument("kernel_capture: requires radius >= 0 and k0 > 0");
    if (radius == 0.0)
        return 0.0;
    return gauss_weighted_integral(
               [radius, k0](double x) {
                   return -std::expm1(-k0 * std::exp(-x * x) * radius);
               },
               spec) /
           kSqrtPi;
}

double kernel_capture_single_frequency(double radius, double k) {
    return -std::expm1(-k * radius);
}

TrappingKernel build_slab_kernel(double thickness, double kappa, int node_count,
                                 const QuadratureSpec& spec) {
    if (!(thickness > 0.0) || !(kappa >= 0.0))
        throw std::invalid_argument("build_slab_kernel: requires thickness > 0 and kappa >= 0");
    if (node_count < 32)
        throw std::invalid_argument("build_slab_kernel: node_count must be >= 32");
    spec.validate();

    TrappingKernel kernel;
    kernel.geometry = Geometry::slab;
    kernel.kappa = kappa;
    kernel.thickness = thickness;
    kernel.nodes.resize(node_count);
    kernel.matrix.assign(static_cast<std::size_t>(node_count) * node_count, 0.0);
    const double h = thickness / node_count;
    for (int i = 0; i < node_count; ++i)
        kernel.nodes[i] = (i + 0.5) * h;
    if (kappa == 0.0)
        return kernel; // free escape

    const double k0 = kappa / thickness;
    const GaussHermite gh(spec.node_count);
    const auto& xs = gh.nodes();
    const auto& ws = gh.weights();

    // Entries are exact cell integrals of (K/2) E1(K |z_i - z'|) per Gauss
    // node; the log singularity on the diagonal integrates analytically.
    parallel_for(node_count, [&](int i) {
        const double zi = kernel.nodes[i];
        for (int j = 0; j < node_count; ++j) {
            const double a = j * h;
            const double b = a + h;
            double sum = 0.0;
            for (std::size_t q = 0; q < xs.size(); ++q) {
                const double k = k0 * std::exp(-xs[q] * xs[q]);
                double cell;
                if (i == j)
                    cell = 0.5 * (exponential_integral_e1_primitive(k * (zi - a)) +
                                  exponential_integral_e1_primitive(k * (b - zi)));
                else
                    cell = 0.5 * std::abs(exponential_integral_e1_primitive(k * std::abs(zi - b)) -
                                          exponential_integral_e1_primitive(k * std::abs(zi - a)));
                sum += ws[q] * cell;
            }
            kernel.matrix[static_cast<std::size_t>(i) * node_count + j] = sum / kSqrtPi;
        }
    });
    return kernel;
}

FieldTrajectory evolve_linear_trapping(const TrappingKernel& kernel,
                                       const std::vector<double>& initial_excitation, double t_end,
                                       int sample_count, const OdeControl& control) {
    const int n = kernel.size();
    if (static_cast<int>(initial_excitation.size()) != n)
        throw std::invalid_argument("evolve_linear_trapping: field size mismatch");
    for (double v : initial_excitation)
        if (v < 0.0)
            throw std::invalid_argument("evolve_linear_trapping: excitation must be >= 0");
    if (sample_count < 2)
        throw std::invalid_argument("evolve_linear_trapping: need at least 2 samples");

    const auto rhs = [&kernel, n](double, const std::vector<double>& y, std::vector<double>& dydt) {
        for (int i = 0; i < n; ++i) {
            double pump = 0.0;
            for (int j = 0; j < n; ++j)
                pump += kernel.entry(i, j) * y[j];
            dydt[i] = -y[i] + pump;
        }
    };
    std::vector<double> samples(sample_count);
    for (int i = 0; i < sample_count; ++i)
        samples[i] = t_end * i / (sample_count - 1);
    samples.front() = 0.0;

    OdeControl ctl = control;
    ctl.max_step = std::max(ctl.max_step, t_end / 64.0);
    const OdeTrajectory traj = integrate_ode(rhs, 0.0, t_end, initial_excitation, ctl, samples);

    FieldTrajectory out;
    out.times = traj.times;
    out.excitation = traj.states;
    return out;
}

EscapeRateResult escape_rate(const TrappingKernel& kernel, double tol) {
    const int n = kernel.size();
    if (n == 0)
        throw std::invalid_argument("escape_rate: empty kernel");

    const auto apply = [&kernel, n](const std::vector<double>& v, std::vector<double>& out) {
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int j = 0; j < n; ++j)
                s += kernel.entry(i, j) * v[j];
            out[i] = s;
        }
    };
    const auto norm = [n](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v)
            s += x * x;
        return std::sqrt(s);
    };

    std::vector<double> v(n, 1.0), mv(n);
    double lambda = 0.0;
    bool converged = false;
    for (int it = 0; it < 100000; ++it) {
        apply(v, mv);
        double num = 0.0, den = 0.0;
        for (int i = 0; i < n; ++i) {
            num += v[i] * mv[i];
            den += v[i] * v[i];
        }
        const double next = num / den;
        const double nrm = norm(mv);
        if (nrm == 0.0) {
            lambda = 0.0;
            v.assign(n, 1.0 / std::sqrt(static_cast<double>(n)));
            converged = true;
            break;
        }
        for (int i = 0; i < n; ++i)
            mv[i] /= nrm;
        double diff = 0.0;
        for (int i = 0; i < n; ++i)
            diff = std::max(diff, std::abs(mv[i] - v[i]));
        v.swap(mv);
        if (std::abs(next - lambda) <= tol * std::max(1.0, std::abs(next)) && diff <= 1e3 * tol) {
            lambda = next;
            converged = true;
            break;
        }
        lambda = next;
    }
    if (!converged)
        throw ConvergenceError("escape_rate: power iteration did not converge");

    // Deflation check: the next eigenvalue must be strictly below lambda_max.
    if (lambda > 0.0) {
        std::vector<double> w(n), mw(n);
        for (int i = 0; i < n; ++i)
            w[i] = (i % 2 == 0 ? 1.0 : -1.0);
        double lambda2 = 0.0;
        for (int it = 0; it < 2000; ++it) {
            double proj = 0.0;
            for (int i = 0; i < n; ++i)
                proj += w[i] * v[i];
            for (int i = 0; i < n; ++i)
                w[i] -= proj * v[i];
            apply(w, mw);
            const double nrm = norm(mw);
            if (nrm == 0.0)
                break;
            double num = 0.0, den = 0.0;
            for (int i = 0; i < n; ++i) {
                num += w[i] * mw[i];
                den += w[i] * w[i];
            }
            lambda2 = num / den;
            for (int i = 0; i < n; ++i)
                w[i] = mw[i] / nrm;
        }
        if (!(lambda2 < lambda))
            throw ConvergenceError("escape_rate: dominant eigenvalue not isolated");
    }

    EscapeRateResult result;
    result.lambda_max = lambda;
    result.gamma_esc_numeric = 1.0 - lambda;
    if (kernel.kappa > std::exp(1.0))
        result.gamma_esc_asymptotic =
            1.0 / (kernel.kappa * std::sqrt(kPi * std::log(kernel.kappa)));
    else
        result.gamma_esc_asymptotic = 0.0;
    result.fundamental_mode = v;
    return result;
}

} // namespace dense_bloch
